//! The interval hierarchy over `[0..r-1]` and per-position phase tracking.
//!
//! With `kappa* = ceil(log_{3/2}(r - 1))` and
//! `l_k = ceil((1 - (2/3)^k)(r - 1))` for `k < kappa*`, the blocks
//! `K_k = [l_k .. l_{k+1} - 1]`, `K_{kappa*-1} = [l_{kappa*-1} .. r - 2]` and
//! `K_{kappa*} = {r - 1}` partition the values. Suffix sets
//! `S_k = [l_k .. r - 1]` are the union of the blocks from `k` upward.
//!
//! All boundaries are computed with integer arithmetic: `(2/3)^k` is carried
//! as the exact fraction `2^k / 3^k`.

use std::collections::BTreeSet;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::FrequencyMatrix;
use crate::scalar::Scalar;
use crate::Exact;

/// Largest alphabet for which the exact powers fit in `u128`.
const MAX_R: usize = 1 << 32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HierarchyTable {
    r: usize,
    kappa_star: usize,
    /// `starts[k]` is the first value of `K_k` for `k <= kappa*`, and
    /// `starts[kappa* + 1] = r`. For `k < kappa*` this is `l_k`.
    starts: Vec<usize>,
    block_of: Vec<usize>,
}

/// Smallest `k` with `(3/2)^k >= r - 1`.
pub fn kappa_star(r: usize) -> usize {
    let target = (r - 1) as u128;
    let (mut pow3, mut pow2, mut k) = (1u128, 1u128, 0usize);
    while pow3 < target * pow2 {
        pow3 *= 3;
        pow2 *= 2;
        k += 1;
    }
    k
}

/// `ceil((1 - (2/3)^kappa)(r - 1))`.
pub fn ell(r: usize, kappa: usize) -> usize {
    let pow3 = 3u128.pow(kappa as u32);
    let pow2 = 2u128.pow(kappa as u32);
    let numer = (pow3 - pow2) * (r - 1) as u128;
    numer.div_ceil(pow3) as usize
}

impl HierarchyTable {
    pub fn build(r: usize) -> Result<Self> {
        if r < 3 {
            return Err(Error::AlphabetTooSmall(r, 3));
        }
        if r > MAX_R {
            return Err(Error::InvalidParameter(format!("r = {r} exceeds {MAX_R}")));
        }
        let kappa_star = kappa_star(r);
        let mut starts: Vec<usize> = (0..kappa_star).map(|k| ell(r, k)).collect();
        starts.push(r - 1);
        starts.push(r);
        if starts.windows(2).any(|w| w[0] > w[1]) || starts[kappa_star - 1] > r - 2 {
            return Err(Error::Corrupted(format!("hierarchy boundaries for r = {r} are not monotone")));
        }
        let mut block_of = vec![0; r];
        for k in 0..=kappa_star {
            block_of[starts[k]..starts[k + 1]].fill(k);
        }
        Ok(Self { r, kappa_star, starts, block_of })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn kappa_star(&self) -> usize {
        self.kappa_star
    }

    /// `l_0 .. l_{kappa*-1}`.
    pub fn ells(&self) -> &[usize] {
        &self.starts[..self.kappa_star]
    }

    /// Values of block `K_kappa`, possibly empty.
    pub fn block(&self, kappa: usize) -> Range<usize> {
        self.starts[kappa]..self.starts[kappa + 1]
    }

    /// Values of `S_kappa`. Indices above `kappa*` give the empty set.
    pub fn suffix(&self, kappa: usize) -> Range<usize> {
        if kappa > self.kappa_star {
            return self.r..self.r;
        }
        self.starts[kappa]..self.r
    }

    pub fn suffix_start(&self, kappa: usize) -> usize {
        self.suffix(kappa).start
    }

    /// Index of the block containing `value`.
    pub fn block_of(&self, value: usize) -> usize {
        self.block_of[value]
    }

    pub fn num_blocks(&self) -> usize {
        self.kappa_star + 1
    }

    /// `mu_i(S_kappa)` as a count out of `K`.
    pub fn suffix_count(&self, m: &FrequencyMatrix, i: usize, kappa: usize) -> u32 {
        m.suffix_count(i, self.suffix_start(kappa))
    }

    pub fn block_count(&self, m: &FrequencyMatrix, i: usize, kappa: usize) -> u32 {
        m.range_count(i, self.block(kappa))
    }

    /// `mu_i(S_{nu+1}) / mu_i(S_nu)`, or `None` when `mu_i(S_nu) = 0`.
    pub fn suffix_ratio(&self, m: &FrequencyMatrix, i: usize, nu: usize) -> Option<Exact> {
        let lower = self.suffix_count(m, i, nu);
        (lower > 0).then(|| Exact::new(i64::from(self.suffix_count(m, i, nu + 1)), i64::from(lower)))
    }

    pub fn phase_state(&self, m: &FrequencyMatrix, i: usize) -> PhaseState {
        assert_eq!(m.r(), self.r, "matrix and hierarchy disagree on r");
        let psi = (0..=self.kappa_star)
            .find(|&k| self.block_count(m, i, k) > 0)
            .expect("a row with positive total mass has a charged block");
        let confined = self.suffix_count(m, i, psi) == m.k();
        PhaseState { position: i, psi, confined, complete: psi == self.kappa_star && confined }
    }
}

/// Convenience wrapper matching [`HierarchyTable::build`].
pub fn build_hierarchy(r: usize) -> Result<HierarchyTable> {
    HierarchyTable::build(r)
}

/// Where position `i` stands in the phase structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseState {
    pub position: usize,
    /// Smallest block index with positive mass.
    pub psi: usize,
    /// Whether all mass lies in `S_psi`.
    pub confined: bool,
    /// All mass on `r - 1`.
    pub complete: bool,
}

/// `mu_i(I) = sum_{j in I} p[i][j]` for an arbitrary value set.
pub fn mass<I>(m: &FrequencyMatrix, i: usize, values: I) -> Result<Exact>
where
    I: IntoIterator<Item = usize>,
{
    if i >= m.n() {
        return Err(Error::IndexOutOfRange { what: "position", index: i, size: m.n() });
    }
    let set: BTreeSet<usize> = values.into_iter().collect();
    if let Some(&v) = set.iter().next_back().filter(|&&v| v >= m.r()) {
        return Err(Error::IndexOutOfRange { what: "value", index: v, size: m.r() });
    }
    let total: u64 = set.iter().map(|&j| u64::from(m.count(i, j))).sum();
    Ok(Exact::new(total as i64, i64::from(m.k())))
}

/// `mu_i` of a contiguous value range, in any scalar type.
pub fn interval_mass<T: Scalar>(m: &FrequencyMatrix, i: usize, values: Range<usize>) -> Result<T> {
    if i >= m.n() {
        return Err(Error::IndexOutOfRange { what: "position", index: i, size: m.n() });
    }
    if values.end > m.r() {
        return Err(Error::IndexOutOfRange { what: "value", index: values.end - 1, size: m.r() });
    }
    Ok(T::from_fraction(i64::from(m.range_count(i, values)), i64::from(m.k())))
}
