use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `sum_{d in [0..rho]} sum_{i in [1..L-d]} q(i) q(i+d)` with
/// `L = m * max(1, rho)`; `q[0]` holds `q(1)`.
pub fn conv_lhs<T: Scalar>(q: &[T], m: usize, rho: usize) -> Result<T> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    let len = m * rho.max(1);
    if q.len() != len {
        return Err(Error::LengthMismatch { expected: len, got: q.len() });
    }
    if let Some(i) = q.iter().position(|v| *v < T::zero()) {
        return Err(Error::InvalidParameter(format!("q({}) is negative", i + 1)));
    }
    let mut total = T::zero();
    for d in 0..=rho.min(len - 1) {
        for i in 0..len - d {
            total = total + q[i].clone() * q[i + d].clone();
        }
    }
    Ok(total)
}

/// `M^2 / (2m)`.
pub fn conv_rhs<T: Scalar>(total: T, m: usize) -> T {
    total.clone() * total / T::from_u64(2 * m as u64)
}
