//! Scalar abstraction shared by exact and floating-point computations.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Num, ToPrimitive};

/// A field-like number type that exact masses can be converted into.
///
/// Implemented for `f32`, `f64`, `Ratio<i64>` and `BigRational`, so that the
/// same generic code can be run once in floating point and once exactly.
pub trait Scalar: Num + Clone + PartialOrd + Debug {
    /// The value `numer / denom`; `denom` must be nonzero.
    fn from_fraction(numer: i64, denom: i64) -> Self;

    fn as_f64(&self) -> f64;

    fn from_u64(value: u64) -> Self {
        Self::from_fraction(value as i64, 1)
    }
}

impl Scalar for f64 {
    fn from_fraction(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }

    fn as_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn from_fraction(numer: i64, denom: i64) -> Self {
        (numer as f64 / denom as f64) as f32
    }

    fn as_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl Scalar for Ratio<i64> {
    fn from_fraction(numer: i64, denom: i64) -> Self {
        Ratio::new(numer, denom)
    }

    fn as_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

impl Scalar for BigRational {
    fn from_fraction(numer: i64, denom: i64) -> Self {
        BigRational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Converts an `f64` into a `BigRational` without rounding.
pub fn exact_from_f64(value: f64) -> Option<BigRational> {
    BigRational::from_float(value)
}
