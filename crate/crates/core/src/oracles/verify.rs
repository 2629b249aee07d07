//! Monte Carlo verifiers, one per bound.
//!
//! Every verifier splits its samples into fixed-size chunks with seeds
//! `seed + chunk_index` and merges integer counts, so results do not depend on
//! the number of worker threads.

use std::ops::Range;

use num_traits::Zero;
use rand::Rng as _;
use rayon::prelude::*;

use super::bounds::{
    biased_window_bound, chernoff_variant_bound, drift_prediction, martingale_beta, martingale_bound, mult_drift_tail,
    mult_drift_time, simulate_reinforced_bernoulli, variance_bound,
};
use super::convolution::{conv_lhs, conv_rhs};
use super::stats::{binomial_lower_tail, binomial_upper_tail, normal_upper_quantile};
use super::{BoundReport, BoundStatus, DEFAULT_SIGNIFICANCE};
use crate::algorithm::{compete, sample_individual, Rcga};
use crate::error::{Error, Result};
use crate::fitness::{Objective, ObjectiveKind};
use crate::hierarchy::HierarchyTable;
use crate::instrumentation::{classify, detect_large_biased};
use crate::matrix::FrequencyMatrix;
use crate::{seeded_rng, BigExact, Rng, Scalar};

const CHUNK: u64 = 10_000;

fn chunked<R, F>(total: u64, seed: u64, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64, &mut Rng) -> R + Sync,
{
    let chunks = total.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|j| {
            let size = CHUNK.min(total - j * CHUNK);
            let mut rng = seeded_rng(seed.wrapping_add(j));
            f(size, &mut rng)
        })
        .collect()
}

/// Status of an upper bound on an event probability, given the observed
/// event count.
fn upper_bound_status(events: u64, trials: u64, bound: f64, significance: f64) -> BoundStatus {
    if bound >= 1.0 {
        BoundStatus::SatisfiedVacuously
    } else if binomial_upper_tail(events, trials, bound) < significance {
        BoundStatus::Violated
    } else {
        BoundStatus::Satisfied
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionCheck {
    pub instances: u64,
    pub max_m: usize,
    pub max_rho: usize,
    /// Leading instances that are also recomputed in exact rationals.
    pub exact_instances: u64,
    pub seed: u64,
}

impl Default for ConvolutionCheck {
    fn default() -> Self {
        Self { instances: 100_000, max_m: 20, max_rho: 10, exact_instances: 100, seed: 1 }
    }
}

/// Random instances of `conv_lhs(q) >= M^2 / (2m)` with `q` uniform in
/// `[0, 1]`. `empirical` is the smallest observed `lhs - rhs`.
pub fn verify_convolution(check: &ConvolutionCheck) -> BoundReport {
    const SLACK: f64 = 1e-12;
    let per_chunk = chunked(check.instances, check.seed, |size, rng| {
        let mut violations = 0u64;
        let mut min_margin = f64::INFINITY;
        let mut max_discrepancy = 0.0f64;
        for idx in 0..size {
            let m = rng.gen_range(1..=check.max_m);
            let rho = rng.gen_range(0..=check.max_rho);
            let q: Vec<f64> = (0..m * rho.max(1)).map(|_| rng.gen::<f64>()).collect();
            let lhs = conv_lhs(&q, m, rho).expect("well-formed instance");
            let rhs = conv_rhs(q.iter().sum::<f64>(), m);
            min_margin = min_margin.min(lhs - rhs);
            if lhs < rhs - SLACK * rhs.max(1.0) {
                violations += 1;
            }
            if idx < check.exact_instances {
                let exact: Vec<BigExact> = q.iter().map(|&v| BigExact::from_float(v).expect("finite")).collect();
                let total = exact.iter().fold(BigExact::zero(), |a, b| a + b);
                let exact_lhs = conv_lhs(&exact, m, rho).expect("well-formed instance");
                if exact_lhs < conv_rhs(total, m) {
                    violations += 1;
                }
                let rel = (Scalar::as_f64(&exact_lhs) - lhs).abs() / lhs.max(1.0);
                max_discrepancy = max_discrepancy.max(rel);
            }
        }
        (violations, min_margin, max_discrepancy)
    });
    let violations: u64 = per_chunk.iter().map(|c| c.0).sum();
    let min_margin = per_chunk.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let discrepancy = per_chunk.iter().map(|c| c.2).fold(0.0, f64::max);
    let exact_checked = check.exact_instances.min(CHUNK) * check.instances.div_ceil(CHUNK);
    let mut report = BoundReport::new("convolution", 0.0)
        .param("max_m", check.max_m as f64)
        .param("max_rho", check.max_rho as f64)
        .param("violations", violations as f64)
        .param("exact_instances", exact_checked.min(check.instances) as f64)
        .param("max_exact_discrepancy", discrepancy);
    report.empirical = Some(min_margin);
    report.samples = check.instances;
    if violations > 0 || discrepancy > SLACK {
        report.status = BoundStatus::Violated;
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfinedLayout {
    /// Each row spreads its mass as evenly as `K` allows over `[j* .. r-1]`.
    Uniform,
    /// Half the mass on `j*`, half on `r - 1`.
    TwoPoint,
}

/// A matrix whose rows all lie in `[j* .. r - 1]`.
pub fn confined_matrix(n: usize, r: usize, k: u64, j_star: usize, layout: ConfinedLayout) -> Result<FrequencyMatrix> {
    if j_star >= r {
        return Err(Error::InvalidParameter(format!("j* = {j_star} must be below r = {r}")));
    }
    let k32 = k as u32;
    let mut row = vec![0u32; r];
    match layout {
        ConfinedLayout::Uniform => {
            let width = (r - j_star) as u32;
            for (offset, slot) in row[j_star..].iter_mut().enumerate() {
                *slot = k32 / width + u32::from((offset as u32) < k32 % width);
            }
        }
        ConfinedLayout::TwoPoint => {
            row[j_star] += k32 / 2;
            row[r - 1] += k32 - k32 / 2;
        }
    }
    FrequencyMatrix::from_counts(n, r, k, row.repeat(n))
}

/// `(sum, sum of squares)` of `draws` samples of the rest sum at `i`.
fn rest_sum_moments(m: &FrequencyMatrix, i: usize, draws: u64, rng: &mut Rng) -> (u64, u128) {
    let (mut sum, mut sum_sq) = (0u64, 0u128);
    for _ in 0..draws {
        let s: u64 = (0..m.n()).filter(|&k| k != i).map(|k| m.sample_value(k, rng) as u64).sum();
        sum += s;
        sum_sq += u128::from(s) * u128::from(s);
    }
    (sum, sum_sq)
}

fn sample_variance(sum: u64, sum_sq: u128, count: u64) -> f64 {
    let n = count as f64;
    let mean = sum as f64 / n;
    (sum_sq as f64 - n * mean * mean) / (n - 1.0)
}

fn check_confined(m: &FrequencyMatrix, i: usize, j_star: usize) -> Result<()> {
    for k in (0..m.n()).filter(|&k| k != i) {
        if m.prefix_count(k, j_star.min(m.r())) != 0 {
            return Err(Error::Precondition(format!("row {k} has mass below j* = {j_star}")));
        }
    }
    Ok(())
}

/// Sample variance of the rest sum `S_{1,i}` over `samples` draws.
pub fn empirical_rest_variance(
    m: &FrequencyMatrix,
    i: usize,
    j_star: usize,
    samples: u64,
    rng: &mut Rng,
) -> Result<f64> {
    if i >= m.n() {
        return Err(Error::IndexOutOfRange { what: "position", index: i, size: m.n() });
    }
    if samples < 2 {
        return Err(Error::InvalidParameter("need at least two samples".into()));
    }
    check_confined(m, i, j_star)?;
    let (sum, sum_sq) = rest_sum_moments(m, i, samples, rng);
    Ok(sample_variance(sum, sum_sq, samples))
}

/// Exact variance of the rest sum at `i`, from the matrix alone.
pub fn exact_rest_variance(m: &FrequencyMatrix, i: usize) -> f64 {
    let k = f64::from(m.k());
    (0..m.n())
        .filter(|&row| row != i)
        .map(|row| {
            let (mut mean, mut second) = (0.0, 0.0);
            for (j, &c) in m.row(row).iter().enumerate() {
                let p = f64::from(c) / k;
                mean += p * j as f64;
                second += p * (j * j) as f64;
            }
            second - mean * mean
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceCheck {
    pub n: usize,
    pub r: usize,
    pub j_star: usize,
    pub layout: ConfinedLayout,
    pub samples: u64,
    /// Multiplier on the bound; defaults to `1 + 3/sqrt(samples)`.
    pub slack: Option<f64>,
    pub seed: u64,
}

impl Default for VarianceCheck {
    fn default() -> Self {
        Self { n: 101, r: 11, j_star: 0, layout: ConfinedLayout::Uniform, samples: 1_000_000, slack: None, seed: 2 }
    }
}

pub fn verify_variance(check: &VarianceCheck) -> Result<BoundReport> {
    let k = (2 * check.r * (check.r - check.j_star)) as u64;
    let m = confined_matrix(check.n, check.r, k, check.j_star, check.layout)?;
    check_confined(&m, 0, check.j_star)?;
    let bound: f64 = variance_bound(check.n, check.r, check.j_star)?;
    let parts = chunked(check.samples, check.seed, |size, rng| rest_sum_moments(&m, 0, size, rng));
    let sum: u64 = parts.iter().map(|p| p.0).sum();
    let sum_sq: u128 = parts.iter().map(|p| p.1).sum();
    let empirical = sample_variance(sum, sum_sq, check.samples);
    let slack = check.slack.unwrap_or(1.0 + 3.0 / (check.samples as f64).sqrt());
    let mut report = BoundReport::new("variance", bound)
        .param("n", check.n as f64)
        .param("r", check.r as f64)
        .param("j_star", check.j_star as f64)
        .param("two_point", f64::from(u8::from(check.layout == ConfinedLayout::TwoPoint)))
        .param("slack", slack)
        .param("exact_variance", exact_rest_variance(&m, 0));
    report.empirical = Some(empirical);
    report.samples = check.samples;
    if empirical > bound * slack {
        report.status = BoundStatus::Violated;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiasedWindowCheck {
    pub n: usize,
    pub r: usize,
    pub delta: u64,
    pub pairs: u64,
    pub significance: f64,
    pub seed: u64,
}

impl Default for BiasedWindowCheck {
    fn default() -> Self {
        Self { n: 50, r: 8, delta: 0, pairs: 100_000, significance: DEFAULT_SIGNIFICANCE, seed: 3 }
    }
}

/// `P[D_i in [0..delta]]` at uniform initialization against
/// `biased_window_bound(delta, sigma)` with `sigma^2 = (n-1)(r-1)^2`.
///
/// The lemma's window preconditions on `E[S] +- 2 sigma` are evaluated and
/// reported as `preconditions_met`.
pub fn verify_biased_window(check: &BiasedWindowCheck) -> Result<BoundReport> {
    let (n, r) = (check.n, check.r);
    let m = FrequencyMatrix::new(n, r, (10 * r) as u64)?;
    let sigma = variance_bound::<f64>(n, r, 0)?.sqrt();
    let bound = biased_window_bound(check.delta, sigma)?;
    let mean = (n - 1) as f64 * (r - 1) as f64 / 2.0;
    let top = ((n - 1) * (r - 1)) as f64;
    let preconditions = (mean - 2.0 * sigma).floor() + 1.0 >= 0.0
        && (mean + 2.0 * sigma).ceil() - 1.0 <= top
        && sigma >= (check.delta as f64 + 2.0) / 4.0
        && check.delta as f64 <= top;

    let hits: u64 = chunked(check.pairs, check.seed, |size, rng| {
        let mut hits = 0u64;
        for _ in 0..size {
            let mut d = 0i64;
            for k in 1..n {
                d += m.sample_value(k, rng) as i64;
            }
            for k in 1..n {
                d -= m.sample_value(k, rng) as i64;
            }
            if (0..=check.delta as i64).contains(&d) {
                hits += 1;
            }
        }
        hits
    })
    .into_iter()
    .sum();

    let mut report = BoundReport::new("biased-window", bound)
        .param("n", n as f64)
        .param("r", r as f64)
        .param("delta", check.delta as f64)
        .param("sigma", sigma)
        .param("preconditions_met", f64::from(u8::from(preconditions)));
    report.empirical = Some(hits as f64 / check.pairs as f64);
    report.samples = check.pairs;
    if binomial_lower_tail(hits, check.pairs, bound) < check.significance {
        report.status = BoundStatus::Violated;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeutralCheck {
    pub n: usize,
    pub r: usize,
    pub k: u64,
    pub t: u64,
    pub alpha: f64,
    pub values: Range<usize>,
    pub position: usize,
    pub runs: u64,
    pub significance: f64,
    pub seed: u64,
}

impl Default for NeutralCheck {
    fn default() -> Self {
        Self {
            n: 20,
            r: 4,
            k: 400,
            t: 1000,
            alpha: 0.5,
            values: 2..4,
            position: 0,
            runs: 10_000,
            significance: DEFAULT_SIGNIFICANCE,
            seed: 4,
        }
    }
}

/// Whether a constant-fitness run leaves the band `|P_s - P_0| < alpha P_0`
/// within `t` iterations.
fn neutral_run_deviates(check: &NeutralCheck, seed: u64) -> Result<bool> {
    let objective = Objective::new(ObjectiveKind::Constant, check.n, check.r)?;
    let mut rcga = Rcga::new(objective, check.k, seed)?;
    let count = |m: &FrequencyMatrix| i64::from(m.range_count(check.position, check.values.clone()));
    let start = count(rcga.matrix());
    let radius = check.alpha * start as f64;
    for _ in 0..check.t {
        rcga.step()?;
        if ((count(rcga.matrix()) - start).abs() as f64) >= radius {
            return Ok(true);
        }
    }
    Ok(radius <= 0.0)
}

/// Deviation frequency of a value-set mass under pure genetic drift against
/// the martingale concentration bound.
pub fn verify_neutral_concentration(check: &NeutralCheck) -> Result<BoundReport> {
    if check.values.is_empty() || check.values.end > check.r || check.position >= check.n {
        return Err(Error::InvalidParameter("value set must be a non-empty range inside [0..r-1]".into()));
    }
    let p0 = check.values.len() as f64 / check.r as f64;
    let beta = martingale_beta(check.alpha, p0);
    let bound = martingale_bound(check.alpha, p0, check.k, check.t, beta);
    let outcomes: Vec<bool> = (0..check.runs)
        .into_par_iter()
        .map(|run| neutral_run_deviates(check, check.seed.wrapping_add(run)))
        .collect::<Result<_>>()?;
    let events = outcomes.iter().filter(|&&e| e).count() as u64;
    let mut report = BoundReport::new("neutral-concentration", bound)
        .param("n", check.n as f64)
        .param("r", check.r as f64)
        .param("K", check.k as f64)
        .param("t", check.t as f64)
        .param("alpha", check.alpha)
        .param("p0", p0)
        .param("beta", beta)
        .param("events", events as f64);
    report.empirical = Some(events as f64 / check.runs as f64);
    report.samples = check.runs;
    report.status = upper_bound_status(events, check.runs, bound, check.significance);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReinforcedCheck {
    pub t: u64,
    pub p: f64,
    pub delta: f64,
    pub b: f64,
    pub rho: f64,
    pub eta: f64,
    pub trajectories: u64,
    pub significance: f64,
    pub seed: u64,
}

impl Default for ReinforcedCheck {
    fn default() -> Self {
        Self {
            t: 1000,
            p: 0.5,
            delta: 0.5,
            b: 0.5,
            rho: 1000.0,
            eta: 1.0,
            trajectories: 100_000,
            significance: DEFAULT_SIGNIFICANCE,
            seed: 5,
        }
    }
}

/// Lower-tail frequency `P[Z_t <= (1 - delta) t p]` of the extremal
/// self-reinforcing process against the Chernoff-type bound.
pub fn verify_reinforced_bernoulli(check: &ReinforcedCheck) -> Result<BoundReport> {
    let t = check.t as f64;
    let needed_b = check.eta * t / (check.rho + check.eta * t);
    if check.b < needed_b {
        return Err(Error::Precondition(format!("b = {} is below eta t/(rho + eta t) = {needed_b}", check.b)));
    }
    let bound = chernoff_variant_bound(check.t, check.p, check.delta, check.b)?;
    let threshold = (1.0 - check.delta) * t * check.p;
    let events: u64 = chunked(check.trajectories, check.seed, |size, rng| -> Result<u64> {
        let mut events = 0;
        for _ in 0..size {
            let z = simulate_reinforced_bernoulli(check.t, check.p, check.rho, check.eta, rng)?;
            if (*z.last().expect("non-empty trajectory") as f64) <= threshold {
                events += 1;
            }
        }
        Ok(events)
    })
    .into_iter()
    .sum::<Result<u64>>()?;
    let mut report = BoundReport::new("reinforced-bernoulli", bound)
        .param("t", t)
        .param("p", check.p)
        .param("delta", check.delta)
        .param("b", check.b)
        .param("rho", check.rho)
        .param("eta", check.eta)
        .param("threshold", threshold);
    report.empirical = Some(events as f64 / check.trajectories as f64);
    report.samples = check.trajectories;
    report.status = upper_bound_status(events, check.trajectories, bound, check.significance);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftCheck {
    pub n: usize,
    pub r: usize,
    pub kappa: usize,
    pub c_drift: f64,
    pub iterations: u64,
    pub significance: f64,
    pub seed: u64,
}

impl Default for DriftCheck {
    fn default() -> Self {
        Self {
            n: 101,
            r: 11,
            kappa: 0,
            c_drift: 0.4,
            iterations: 1_000_000,
            significance: DEFAULT_SIGNIFICANCE,
            seed: 6,
        }
    }
}

/// One-step estimate of `K E[mu(S_{kappa+1})' - mu(S_{kappa+1})]` at a
/// uniform G-OneMax matrix, against the drift prediction.
///
/// `s = mu(S_{kappa+1})` and the witnessed ratio
/// `mu(S_{kappa+2}) / mu(S_{kappa+1})` are read off the matrix; the check
/// refuses to run if the witnessed ratio is below `c_drift`.
pub fn verify_drift(check: &DriftCheck) -> Result<BoundReport> {
    let (n, r, kappa) = (check.n, check.r, check.kappa);
    let h = HierarchyTable::build(r)?;
    let objective = Objective::new(ObjectiveKind::GOneMax, n, r)?;
    let m = FrequencyMatrix::new(n, r, (10 * r) as u64)?;
    let k = f64::from(m.k());
    if h.suffix_count(&m, 0, kappa) != m.k() {
        return Err(Error::Precondition(format!("mu(S_{kappa}) must be 1")));
    }
    let s_count = h.suffix_count(&m, 0, kappa + 1);
    let witnessed = f64::from(h.suffix_count(&m, 0, kappa + 2)) / f64::from(s_count);
    if witnessed < check.c_drift {
        return Err(Error::Precondition(format!("witnessed ratio {witnessed} is below c_drift = {}", check.c_drift)));
    }
    let s = f64::from(s_count) / k;
    let prediction = drift_prediction(n, r, kappa, check.c_drift, s)?;
    let target = h.suffix(kappa + 1);

    let parts = chunked(check.iterations, check.seed, |size, rng| {
        let (mut sum, mut sum_sq, mut large) = (0i64, 0u64, 0u64);
        for _ in 0..size {
            let x1 = sample_individual(&m, rng, &objective);
            let x2 = sample_individual(&m, rng, &objective);
            let c = compete(x1, x2, rng);
            let (w, l) = (c.winner.values[0], c.loser.values[0]);
            let change = i64::from(target.contains(&w)) - i64::from(target.contains(&l));
            sum += change;
            sum_sq += change.unsigned_abs();
            let gap = w as i64 - l as i64;
            let rest = (c.winner.fitness as i64 - w as i64) - (c.loser.fitness as i64 - l as i64);
            let class = classify(gap, rest, c.tied);
            if detect_large_biased(&[w], &[l], 0, 1, class, &h) == Some(kappa) {
                large += 1;
            }
        }
        (sum, sum_sq, large)
    });
    let samples = check.iterations as f64;
    let sum: i64 = parts.iter().map(|p| p.0).sum();
    let sum_sq: u64 = parts.iter().map(|p| p.1).sum();
    let large: u64 = parts.iter().map(|p| p.2).sum();
    let mean = sum as f64 / samples;
    let var = (sum_sq as f64 - samples * mean * mean) / (samples - 1.0);
    let se = (var / samples).sqrt();

    let mut report = BoundReport::new("drift", prediction.formula)
        .param("n", n as f64)
        .param("r", r as f64)
        .param("kappa", kappa as f64)
        .param("c_drift", check.c_drift)
        .param("c_drift_witnessed", witnessed)
        .param("s", s)
        .param("fallback", prediction.fallback)
        .param("large_biased_rate", large as f64 / samples)
        .param("standard_error", se);
    report.empirical = Some(mean);
    report.samples = check.iterations;
    if mean + normal_upper_quantile(check.significance) * se < prediction.formula {
        report.status = BoundStatus::Violated;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultDriftCheck {
    pub x0: f64,
    pub x_min: f64,
    pub delta: f64,
    pub gamma: f64,
    pub q: f64,
    pub trajectories: u64,
    pub significance: f64,
    pub seed: u64,
}

impl Default for MultDriftCheck {
    fn default() -> Self {
        Self {
            x0: 1.0,
            x_min: 1e-3,
            delta: 0.01,
            gamma: 100f64.ln(),
            q: 0.02,
            trajectories: 10_000,
            significance: DEFAULT_SIGNIFICANCE,
            seed: 7,
        }
    }
}

/// Synthetic process `X_{t+1} = X_t (1 - 2 delta U_t)` with `U_t` uniform on
/// `[0, 1]`, so `E[X_{t+1} | X_t] = (1 - delta) X_t`. With probability `q` a
/// trajectory is a failure: the drift condition never holds and `X` stays at
/// `X0`. The report compares `P[T > beta]` with `q + e^-gamma`.
pub fn verify_multiplicative_drift(check: &MultDriftCheck) -> Result<BoundReport> {
    let beta = mult_drift_time(check.x0, check.x_min, check.gamma, check.delta)?;
    let bound = mult_drift_tail(check.q, check.gamma);
    let horizon = beta.floor() as u64;
    let events: u64 = chunked(check.trajectories, check.seed, |size, rng| {
        let mut events = 0u64;
        for _ in 0..size {
            let failed = rng.gen::<f64>() < check.q;
            let mut x = check.x0;
            let mut hit = false;
            for _ in 0..=horizon {
                if x < check.x_min {
                    hit = true;
                    break;
                }
                if !failed {
                    x *= 1.0 - 2.0 * check.delta * rng.gen::<f64>();
                }
            }
            if !hit {
                events += 1;
            }
        }
        events
    })
    .into_iter()
    .sum();
    let mut report = BoundReport::new("multiplicative-drift", bound)
        .param("x0", check.x0)
        .param("x_min", check.x_min)
        .param("delta", check.delta)
        .param("gamma", check.gamma)
        .param("q", check.q)
        .param("beta", beta);
    report.empirical = Some(events as f64 / check.trajectories as f64);
    report.samples = check.trajectories;
    report.status = upper_bound_status(events, check.trajectories, bound, check.significance);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn confined_layouts() {
        let m = confined_matrix(3, 11, 110, 4, ConfinedLayout::Uniform).unwrap();
        m.check_invariants().unwrap();
        assert_eq!(m.prefix_count(0, 4), 0);
        let m = confined_matrix(3, 11, 22, 4, ConfinedLayout::TwoPoint).unwrap();
        assert_eq!((m.count(1, 4), m.count(1, 10)), (11, 11));
        let m = confined_matrix(2, 11, 22, 10, ConfinedLayout::TwoPoint).unwrap();
        assert_eq!(m.count(0, 10), 22);
        assert!(confined_matrix(2, 11, 22, 11, ConfinedLayout::Uniform).is_err());
    }

    #[test]
    fn empirical_variance_precondition() {
        let m = FrequencyMatrix::new(5, 4, 8).unwrap();
        let mut rng = seeded_rng(0);
        assert!(matches!(empirical_rest_variance(&m, 0, 1, 100, &mut rng), Err(Error::Precondition(_))));
        let v = empirical_rest_variance(&m, 0, 0, 20_000, &mut rng).unwrap();
        // Four uniform rows on [0..3], each with variance 15/12.
        assert!((v - 5.0).abs() < 0.15, "variance {v}");
        assert!((exact_rest_variance(&m, 0) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn point_mass_has_zero_variance() {
        let m = confined_matrix(10, 11, 22, 10, ConfinedLayout::Uniform).unwrap();
        let mut rng = seeded_rng(0);
        assert_eq!(empirical_rest_variance(&m, 3, 10, 1000, &mut rng), Ok(0.0));
    }

    #[test]
    fn small_verifiers_pass() {
        let conv = verify_convolution(&ConvolutionCheck { instances: 2_000, ..Default::default() });
        assert_eq!(conv.status, BoundStatus::Satisfied);
        assert_eq!(conv.parameters["violations"], 0.0);

        let neutral = verify_neutral_concentration(&NeutralCheck { runs: 200, t: 200, ..Default::default() }).unwrap();
        assert!(neutral.satisfied());

        let vacuous =
            verify_neutral_concentration(&NeutralCheck { runs: 20, t: 50, alpha: 0.01, ..Default::default() }).unwrap();
        assert_eq!(vacuous.status, BoundStatus::SatisfiedVacuously);
    }

    #[test]
    fn results_do_not_depend_on_thread_count() {
        let check = ReinforcedCheck { trajectories: 25_000, t: 100, rho: 100.0, ..Default::default() };
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let a = one.install(|| verify_reinforced_bernoulli(&check)).unwrap();
        let b = verify_reinforced_bernoulli(&check).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn reinforced_precondition() {
        let check = ReinforcedCheck { b: 0.2, ..Default::default() };
        assert!(matches!(verify_reinforced_bernoulli(&check), Err(Error::Precondition(_))));
    }
}
