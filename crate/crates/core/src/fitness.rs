//! Benchmark objectives over `[0..r-1]^n`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveKind {
    /// Sum of all values.
    #[serde(rename = "g-onemax")]
    GOneMax,
    /// Number of positions holding the top value `r - 1`.
    #[serde(rename = "r-onemax")]
    ROneMax,
    /// Always 0; every comparison is a tie.
    Constant,
}

impl ObjectiveKind {
    pub const ALL: [ObjectiveKind; 3] = [Self::GOneMax, Self::ROneMax, Self::Constant];

    /// Canonical config-file identifier.
    pub fn name(self) -> &'static str {
        match self {
            Self::GOneMax => "g-onemax",
            Self::ROneMax => "r-onemax",
            Self::Constant => "constant",
        }
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ObjectiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown objective {s:?}")))
    }
}

/// A named objective bound to a dimension and alphabet size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Objective {
    pub kind: ObjectiveKind,
    pub n: usize,
    pub r: usize,
}

impl Objective {
    pub fn new(kind: ObjectiveKind, n: usize, r: usize) -> Result<Self> {
        if r < 2 {
            return Err(Error::AlphabetTooSmall(r, 2));
        }
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        Ok(Self { kind, n, r })
    }

    pub fn optimum_value(&self) -> Option<u64> {
        match self.kind {
            ObjectiveKind::GOneMax => Some((self.n * (self.r - 1)) as u64),
            ObjectiveKind::ROneMax => Some(self.n as u64),
            ObjectiveKind::Constant => None,
        }
    }

    /// What a single position holding `value` adds to the objective.
    ///
    /// All three objectives are separable, so fitness differences split into
    /// a position term and a rest term.
    #[inline]
    pub fn contribution(&self, value: usize) -> u64 {
        match self.kind {
            ObjectiveKind::GOneMax => value as u64,
            ObjectiveKind::ROneMax => u64::from(value == self.r - 1),
            ObjectiveKind::Constant => 0,
        }
    }

    /// Evaluates `x`, validating its length and entries.
    pub fn evaluate(&self, x: &[usize]) -> Result<u64> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: x.len() });
        }
        check_range(x, self.r)?;
        Ok(self.evaluate_unchecked(x))
    }

    /// Evaluates `x` assuming it is a valid individual.
    #[inline]
    pub fn evaluate_unchecked(&self, x: &[usize]) -> u64 {
        match self.kind {
            ObjectiveKind::Constant => 0,
            _ => x.iter().map(|&v| self.contribution(v)).sum(),
        }
    }
}

fn check_range(x: &[usize], r: usize) -> Result<()> {
    match x.iter().position(|&v| v >= r) {
        Some(position) => Err(Error::ValueOutOfRange { position, value: x[position], max: r - 1 }),
        None => Ok(()),
    }
}

/// Sum of the entries of `x`, each of which must lie in `[0..r-1]`.
pub fn g_onemax(x: &[usize], r: usize) -> Result<u64> {
    check_range(x, r)?;
    Ok(x.iter().map(|&v| v as u64).sum())
}

/// Number of entries of `x` equal to `r - 1`.
pub fn r_onemax(x: &[usize], r: usize) -> Result<u64> {
    check_range(x, r)?;
    Ok(x.iter().filter(|&&v| v == r - 1).count() as u64)
}

pub fn constant(_x: &[usize]) -> u64 {
    0
}

#[cfg(test)]
mod tests {
    #[test]
    fn serde_names_match_display() {
        for kind in super::ObjectiveKind::ALL {
            let json = serde_json::to_string(&kind).unwrap();
            assert_eq!(json, format!("\"{}\"", kind.name()));
        }
    }

    use super::*;
    use proptest::prelude::*;

    #[test]
    fn g_onemax_examples() {
        assert_eq!(g_onemax(&[0, 0, 0], 3), Ok(0));
        assert_eq!(g_onemax(&[2, 2, 2], 3), Ok(6));
        assert_eq!(g_onemax(&[1, 2, 3], 4), Ok(6));
        assert!(matches!(g_onemax(&[1, 2, 3], 3), Err(Error::ValueOutOfRange { position: 2, .. })));
    }

    #[test]
    fn r_onemax_examples() {
        assert_eq!(r_onemax(&[2, 2, 0], 3), Ok(2));
        assert_eq!(r_onemax(&[4, 4, 4, 4], 5), Ok(4));
        assert_eq!(r_onemax(&[0, 1, 2, 3], 5), Ok(0));
        assert!(r_onemax(&[5], 5).is_err());
    }

    #[test]
    fn constant_examples() {
        assert_eq!(constant(&[0, 0]), 0);
        assert_eq!(constant(&[4, 1, 3]), 0);
    }

    #[test]
    fn optimum_values() {
        let g = Objective::new(ObjectiveKind::GOneMax, 7, 5).unwrap();
        assert_eq!(g.optimum_value(), Some(28));
        let r = Objective::new(ObjectiveKind::ROneMax, 7, 5).unwrap();
        assert_eq!(r.optimum_value(), Some(7));
        let c = Objective::new(ObjectiveKind::Constant, 7, 5).unwrap();
        assert_eq!(c.optimum_value(), None);
        assert!(g.evaluate(&[4; 6]).is_err());
        assert_eq!(g.evaluate(&[4; 7]), Ok(28));
    }

    #[test]
    fn names_round_trip() {
        for kind in ObjectiveKind::ALL {
            assert_eq!(kind.name().parse::<ObjectiveKind>(), Ok(kind));
        }
        assert!("onemax".parse::<ObjectiveKind>().is_err());
    }

    fn vector() -> impl Strategy<Value = (usize, Vec<usize>)> {
        (2usize..12).prop_flat_map(|r| (Just(r), prop::collection::vec(0..r, 1..40)))
    }

    proptest! {
        #[test]
        fn g_onemax_is_strictly_monotone((r, x) in vector(), pos in any::<prop::sample::Index>()) {
            let i = pos.index(x.len());
            prop_assume!(x[i] < r - 1);
            let mut y = x.clone();
            y[i] += 1;
            prop_assert!(g_onemax(&y, r).unwrap() > g_onemax(&x, r).unwrap());
        }

        #[test]
        fn r_onemax_bounded_by_scaled_g_onemax((r, x) in vector()) {
            let lhs = r_onemax(&x, r).unwrap() * (r as u64 - 1);
            let rhs = g_onemax(&x, r).unwrap();
            prop_assert!(lhs <= rhs);
            let all_top_or_zero = x.iter().all(|&v| v == 0 || v == r - 1);
            prop_assert_eq!(lhs == rhs, all_top_or_zero);
        }
    }
}
