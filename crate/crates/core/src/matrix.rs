//! The frequency matrix of the r-cGA, stored as integer counts out of `K`.

use std::ops::Range;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{Exact, Rng};

const NOT_FIXED: u32 = u32::MAX;

/// An `n x r` table of sampling probabilities `p[i][j] = counts[i][j] / K`.
///
/// Every row sums to `K` exactly and `K` is a multiple of `r`. Per-row prefix
/// sums are kept alongside the counts, so suffix masses and sampling are
/// lookups rather than scans.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyMatrix {
    n: usize,
    r: usize,
    k: u32,
    counts: Vec<u32>,
    /// `prefix[i * (r + 1) + j] = counts[i][0] + ... + counts[i][j - 1]`.
    prefix: Vec<u32>,
    /// Value holding all of row `i`'s mass, or `NOT_FIXED`.
    fixed: Vec<u32>,
}

impl FrequencyMatrix {
    /// Uniform initialization: every count is `K / r`.
    pub fn new(n: usize, r: usize, k: u64) -> Result<Self> {
        Self::check_shape(n, r, k)?;
        let per_value = (k / r as u64) as u32;
        Self::from_counts(n, r, k, vec![per_value; n * r])
    }

    /// Builds a matrix from explicit row-major counts, validating every
    /// invariant.
    pub fn from_counts(n: usize, r: usize, k: u64, counts: Vec<u32>) -> Result<Self> {
        Self::check_shape(n, r, k)?;
        if counts.len() != n * r {
            return Err(Error::LengthMismatch { expected: n * r, got: counts.len() });
        }
        let k = k as u32;
        let mut prefix = vec![0u32; n * (r + 1)];
        let mut fixed = vec![NOT_FIXED; n];
        for i in 0..n {
            let row = &counts[i * r..(i + 1) * r];
            let mut acc = 0u64;
            for (j, &c) in row.iter().enumerate() {
                acc += u64::from(c);
                if acc > u64::from(k) {
                    return Err(Error::Corrupted(format!("row {i} exceeds K = {k}")));
                }
                prefix[i * (r + 1) + j + 1] = acc as u32;
                if c == k {
                    fixed[i] = j as u32;
                }
            }
            if acc != u64::from(k) {
                return Err(Error::Corrupted(format!("row {i} sums to {acc}, expected {k}")));
            }
        }
        Ok(Self { n, r, k, counts, prefix, fixed })
    }

    fn check_shape(n: usize, r: usize, k: u64) -> Result<()> {
        if r < 2 {
            return Err(Error::AlphabetTooSmall(r, 2));
        }
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        if k == 0 || k > u64::from(u32::MAX - 1) {
            return Err(Error::InvalidParameter(format!("K = {k} must lie in [1, 2^32 - 2]")));
        }
        if !k.is_multiple_of(r as u64) {
            return Err(Error::IllBehavedK { k, r: r as u64 });
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// The hypothetical population size `K`.
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.counts[i * self.r..(i + 1) * self.r]
    }

    /// All counts, row-major.
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn count(&self, i: usize, j: usize) -> u32 {
        self.counts[i * self.r + j]
    }

    pub fn frequency(&self, i: usize, j: usize) -> Exact {
        Exact::new(i64::from(self.count(i, j)), i64::from(self.k))
    }

    /// Sum of counts of values `< j` in row `i`; `j` may equal `r`.
    pub fn prefix_count(&self, i: usize, j: usize) -> u32 {
        self.prefix[i * (self.r + 1) + j]
    }

    /// Sum of counts of values in `values` (a sub-range of `0..r`) in row `i`.
    pub fn range_count(&self, i: usize, values: Range<usize>) -> u32 {
        if values.start >= values.end {
            return 0;
        }
        self.prefix_count(i, values.end) - self.prefix_count(i, values.start)
    }

    /// Sum of counts of values `>= start` in row `i`.
    pub fn suffix_count(&self, i: usize, start: usize) -> u32 {
        self.k - self.prefix_count(i, start.min(self.r))
    }

    /// The value holding all of row `i`'s mass, if the row is degenerate.
    pub fn fixed_value(&self, i: usize) -> Option<usize> {
        let v = self.fixed[i];
        (v != NOT_FIXED).then_some(v as usize)
    }

    /// Whether every row puts all of its mass on `value`.
    pub fn all_mass_on(&self, value: usize) -> bool {
        self.fixed.iter().all(|&v| v as usize == value)
    }

    /// Draws the value at position `i`.
    ///
    /// Degenerate rows return their value without consuming randomness;
    /// otherwise one uniform integer in `[0, K)` is drawn and located among
    /// the row's prefix sums.
    pub fn sample_value(&self, i: usize, rng: &mut Rng) -> usize {
        if let Some(v) = self.fixed_value(i) {
            return v;
        }
        let u = rng.gen_range(0..self.k);
        let prefix = &self.prefix[i * (self.r + 1) + 1..(i + 1) * (self.r + 1)];
        prefix.partition_point(|&p| p <= u)
    }

    /// Moves `1/K` of mass in row `i` from `loser` to `winner`.
    pub fn shift(&mut self, i: usize, winner: usize, loser: usize) -> Result<()> {
        if winner == loser {
            return Ok(());
        }
        let r = self.r;
        if winner >= r || loser >= r {
            return Err(Error::ValueOutOfRange { position: i, value: winner.max(loser), max: r - 1 });
        }
        let base = i * r;
        if self.counts[base + loser] == 0 {
            return Err(Error::Corrupted(format!("count of value {loser} at position {i} would become negative")));
        }
        self.counts[base + loser] -= 1;
        self.counts[base + winner] += 1;
        let prefix = &mut self.prefix[i * (r + 1)..(i + 1) * (r + 1)];
        if winner < loser {
            for p in &mut prefix[winner + 1..=loser] {
                *p += 1;
            }
        } else {
            for p in &mut prefix[loser + 1..=winner] {
                *p -= 1;
            }
        }
        if self.counts[base + winner] == self.k {
            self.fixed[i] = winner as u32;
        }
        Ok(())
    }

    /// Checks row sums, count bounds, and the cached prefix sums.
    pub fn check_invariants(&self) -> Result<()> {
        if !self.k.is_multiple_of(self.r as u32) {
            return Err(Error::IllBehavedK { k: u64::from(self.k), r: self.r as u64 });
        }
        for i in 0..self.n {
            let mut acc = 0u32;
            for j in 0..self.r {
                if self.prefix_count(i, j) != acc {
                    return Err(Error::Corrupted(format!("stale prefix sum at ({i}, {j})")));
                }
                let c = self.count(i, j);
                if c > self.k {
                    return Err(Error::Corrupted(format!("count at ({i}, {j}) exceeds K")));
                }
                acc += c;
            }
            if acc != self.k || self.prefix_count(i, self.r) != acc {
                return Err(Error::Corrupted(format!("row {i} sums to {acc}")));
            }
        }
        Ok(())
    }
}
