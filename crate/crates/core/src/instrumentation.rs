//! Per-iteration analysis of r-cGA runs.
//!
//! For a position `i`, the samples' values at the other positions sum to the
//! rest sums `S1`, `S2` with difference `D = S1 - S2`. An iteration is a
//! *biased* step at `i` when the value gap at `i` alone decides the
//! comparison (`|gap| > |D|`); otherwise the update at `i` is a random walk.
//! Both are computed with respect to the objective's per-position
//! contribution, which for G-OneMax is the value itself.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::algorithm::{Step, Trace};
use crate::error::{Error, Result};
use crate::fitness::{Objective, ObjectiveKind};
use crate::hierarchy::HierarchyTable;
use crate::matrix::FrequencyMatrix;
use crate::Exact;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepClass {
    Biased,
    RandomWalk,
}

impl StepClass {
    pub fn name(self) -> &'static str {
        match self {
            Self::Biased => "biased",
            Self::RandomWalk => "random-walk",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositionRecord {
    /// Rest-sum difference `S1 - S2` in sample draw order.
    pub d: i64,
    pub class: StepClass,
    /// `kappa` of the large biased step at this position, if one occurred.
    pub large_biased: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: u64,
    pub x1: Vec<usize>,
    pub x2: Vec<usize>,
    pub winner_index: u8,
    pub tied: bool,
    pub positions: Vec<PositionRecord>,
}

impl StepRecord {
    pub fn winner(&self) -> &[usize] {
        if self.winner_index == 1 {
            &self.x1
        } else {
            &self.x2
        }
    }

    pub fn loser(&self) -> &[usize] {
        if self.winner_index == 1 {
            &self.x2
        } else {
            &self.x1
        }
    }
}

/// Suffix-set masses of every position at one time, as counts out of `K`:
/// `suffix_counts[i * (kappa* + 1) + kappa] = K * mu_i(S_kappa)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MassRecord {
    pub t: u64,
    pub suffix_counts: Vec<u32>,
}

impl MassRecord {
    pub fn capture(t: u64, m: &FrequencyMatrix, h: &HierarchyTable) -> Self {
        let suffix_counts =
            (0..m.n()).flat_map(|i| (0..h.num_blocks()).map(move |k| h.suffix_count(m, i, k))).collect();
        Self { t, suffix_counts }
    }
}

/// G-OneMax rest sums `(S1, S2, D)` excluding position `i`.
pub fn rest_sums(x1: &[usize], x2: &[usize], i: usize) -> (i64, i64, i64) {
    let sum = |x: &[usize]| -> i64 { x.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &v)| v as i64).sum() };
    let (s1, s2) = (sum(x1), sum(x2));
    (s1, s2, s1 - s2)
}

/// Rest sums with respect to an arbitrary separable objective.
pub fn rest_sums_for(objective: &Objective, x1: &[usize], x2: &[usize], i: usize) -> (i64, i64, i64) {
    let sum = |x: &[usize]| -> i64 {
        x.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &v)| objective.contribution(v) as i64).sum()
    };
    let (s1, s2) = (sum(x1), sum(x2));
    (s1, s2, s1 - s2)
}

/// Classifies from the position gap `x1_i - x2_i` and rest difference `D`.
///
/// An overall tie is always a random-walk step: the winner was chosen by a
/// coin flip, not by the value at the position.
pub fn classify(position_gap: i64, rest_gap: i64, tied: bool) -> StepClass {
    if !tied && position_gap.abs() > rest_gap.abs() {
        StepClass::Biased
    } else {
        StepClass::RandomWalk
    }
}

/// G-OneMax classification of position `i`.
pub fn classify_step(x1: &[usize], x2: &[usize], i: usize, tied: bool) -> StepClass {
    let (_, _, d) = rest_sums(x1, x2, i);
    classify(x1[i] as i64 - x2[i] as i64, d, tied)
}

/// Returns `kappa` when one sample's value at `i` lies in `K_kappa`, the
/// other's in `S_{kappa+2}`, the step is biased, and the winner holds the
/// `S_{kappa+2}` value. Only `kappa` in `[0 .. kappa* - 2]` qualifies.
pub fn detect_large_biased(
    x1: &[usize],
    x2: &[usize],
    i: usize,
    winner_index: u8,
    class: StepClass,
    h: &HierarchyTable,
) -> Option<usize> {
    if class != StepClass::Biased || h.kappa_star() < 2 {
        return None;
    }
    let (winner, loser) = if winner_index == 1 { (x1[i], x2[i]) } else { (x2[i], x1[i]) };
    let kappa = h.block_of(loser);
    if kappa + 2 <= h.kappa_star() && winner >= h.suffix_start(kappa + 2) {
        Some(kappa)
    } else {
        None
    }
}

/// Builds the full per-position record of one iteration.
pub fn record_step(objective: &Objective, h: Option<&HierarchyTable>, step: &Step) -> StepRecord {
    let (x1, x2) = (&step.x1.values, &step.x2.values);
    let total = |x: &[usize]| -> i64 { x.iter().map(|&v| objective.contribution(v) as i64).sum() };
    let (t1, t2) = (total(x1), total(x2));
    let positions = (0..x1.len())
        .map(|i| {
            let c1 = objective.contribution(x1[i]) as i64;
            let c2 = objective.contribution(x2[i]) as i64;
            let d = (t1 - c1) - (t2 - c2);
            let class = classify(c1 - c2, d, step.tied);
            let large_biased = match (h, objective.kind) {
                (Some(h), ObjectiveKind::GOneMax) => detect_large_biased(x1, x2, i, step.winner_index, class, h),
                _ => None,
            };
            PositionRecord { d, class, large_biased }
        })
        .collect();
    StepRecord {
        t: step.t,
        x1: x1.clone(),
        x2: x2.clone(),
        winner_index: step.winner_index,
        tied: step.tied,
        positions,
    }
}

/// One event of a stopping-time sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    /// Event time `U_s`: the matrix at `U_s` is the result of iteration
    /// `U_s - 1`.
    pub time: u64,
    /// `K * (mu(U_s) - mu(U_s - 1))`.
    pub delta: i64,
    /// `K * mu_{i|U}` after this event.
    pub filtered: i64,
}

/// Random-walk/biased decomposition of the mass of one value set at one
/// position over `(base_time, base_time + horizon]`.
///
/// All masses are numerators over [`DecomposedSeries::k`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecomposedSeries {
    pub position: usize,
    pub values: Range<usize>,
    pub base_time: u64,
    pub horizon: u64,
    pub k: u32,
    /// `K * mu_i(S)` at `base_time`.
    pub mu_base: i64,
    pub random_walk: Vec<Event>,
    pub biased: Vec<Event>,
}

impl DecomposedSeries {
    pub fn random_walk_times(&self) -> impl Iterator<Item = u64> + '_ {
        self.random_walk.iter().map(|e| e.time)
    }

    pub fn biased_times(&self) -> impl Iterator<Item = u64> + '_ {
        self.biased.iter().map(|e| e.time)
    }

    pub fn delta(e: &Event, k: u32) -> Exact {
        Exact::new(e.delta, i64::from(k))
    }

    pub fn filtered_change(&self, class: StepClass) -> Vec<Exact> {
        let events = match class {
            StepClass::Biased => &self.biased,
            StepClass::RandomWalk => &self.random_walk,
        };
        let k = i64::from(self.k);
        std::iter::once(Exact::new(self.mu_base, k)).chain(events.iter().map(|e| Exact::new(e.filtered, k))).collect()
    }

    /// `K * mu_i(S)` at `base_time + s` for `s = 0 ..= horizon`, rebuilt by
    /// merging both event sequences.
    pub fn reconstructed(&self) -> Vec<i64> {
        let mut step = vec![0i64; self.horizon as usize + 1];
        for e in self.random_walk.iter().chain(&self.biased) {
            step[(e.time - self.base_time) as usize] += e.delta;
        }
        let mut acc = self.mu_base;
        step.iter()
            .map(|d| {
                acc += d;
                acc
            })
            .collect()
    }
}

/// Splits iterations at position `i` into random-walk and biased events and
/// accumulates the contribution of each to `mu_i(values)`.
pub fn decompose(
    trace: &Trace,
    i: usize,
    values: Range<usize>,
    base_time: u64,
    horizon: u64,
) -> Result<DecomposedSeries> {
    let Trace::Full { initial, records, .. } = trace else {
        return Err(Error::MissingTrace("full step records"));
    };
    if i >= initial.n() {
        return Err(Error::IndexOutOfRange { what: "position", index: i, size: initial.n() });
    }
    if values.end > initial.r() {
        return Err(Error::IndexOutOfRange { what: "value", index: values.end - 1, size: initial.r() });
    }
    let end = base_time + horizon;
    if (records.len() as u64) < end {
        return Err(Error::Precondition(format!("trace has {} iterations, decomposition needs {end}", records.len())));
    }
    let member = |v: usize| i64::from(values.contains(&v));
    let delta_of = |rec: &StepRecord| member(rec.winner()[i]) - member(rec.loser()[i]);

    let mut mu = i64::from(initial.range_count(i, values.clone()));
    for rec in &records[..base_time as usize] {
        mu += delta_of(rec);
    }
    let mu_base = mu;

    let (mut random_walk, mut biased) = (Vec::new(), Vec::new());
    let (mut rw_acc, mut b_acc) = (mu_base, mu_base);
    for rec in &records[base_time as usize..end as usize] {
        let delta = delta_of(rec);
        let time = rec.t + 1;
        match rec.positions[i].class {
            StepClass::RandomWalk => {
                rw_acc += delta;
                random_walk.push(Event { time, delta, filtered: rw_acc });
            }
            StepClass::Biased => {
                b_acc += delta;
                biased.push(Event { time, delta, filtered: b_acc });
            }
        }
    }
    Ok(DecomposedSeries { position: i, values, base_time, horizon, k: initial.k(), mu_base, random_walk, biased })
}

/// One phase of one position: the span during which `psi` equals `kappa`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub position: usize,
    pub kappa: usize,
    pub start: u64,
    pub end: u64,
    /// The phase was jumped over (its block had no mass when reached).
    pub skipped: bool,
    /// The phase ended before the run did.
    pub closed: bool,
    /// `mu(S_{nu+1}) / mu(S_nu)` at phase start, for `nu = kappa + 1 ..
    /// kappa* - 1`; `None` where `mu(S_nu) = 0`.
    pub ratios_start: Vec<Option<Exact>>,
    pub ratios_end: Vec<Option<Exact>>,
}

impl PhaseRecord {
    /// First `nu` that `ratios_start[0]` refers to.
    pub fn first_nu(&self) -> usize {
        self.kappa + 1
    }

    /// Whether every applicable ratio kept at least `factor` of its start
    /// value; `None` when the phase was skipped or no ratio is defined.
    pub fn retained(&self, factor: Exact) -> Option<bool> {
        if self.skipped {
            return None;
        }
        let mut any = false;
        for (start, end) in self.ratios_start.iter().zip(&self.ratios_end) {
            if let (Some(s), Some(e)) = (start, end) {
                any = true;
                if *e < *s * factor {
                    return Some(false);
                }
            }
        }
        any.then_some(true)
    }
}

/// `(1 - 1/kappa*)^3`, the per-phase ratio-retention factor.
pub fn retention_factor(kappa_star: usize) -> Exact {
    let k = kappa_star as i64;
    Exact::new((k - 1).pow(3), k.pow(3))
}

/// Follows `psi` at every position across a run and emits phase records.
#[derive(Debug, Clone)]
pub struct PhaseTracker {
    h: HierarchyTable,
    current: Vec<OpenPhase>,
    finished: Vec<PhaseRecord>,
}

#[derive(Debug, Clone)]
struct OpenPhase {
    kappa: usize,
    start: u64,
    ratios_start: Vec<Option<Exact>>,
}

impl PhaseTracker {
    /// Starts tracking at time 0 from matrix `m`.
    pub fn new(h: HierarchyTable, m: &FrequencyMatrix) -> Self {
        let mut tracker = Self { h, current: Vec::with_capacity(m.n()), finished: Vec::new() };
        for i in 0..m.n() {
            let psi = tracker.h.phase_state(m, i).psi;
            let open = tracker.open(m, i, psi, 0);
            tracker.current.push(open);
        }
        tracker
    }

    fn ratios(&self, m: &FrequencyMatrix, i: usize, kappa: usize) -> Vec<Option<Exact>> {
        (kappa + 1..self.h.kappa_star()).map(|nu| self.h.suffix_ratio(m, i, nu)).collect()
    }

    fn open(&self, m: &FrequencyMatrix, i: usize, kappa: usize, t: u64) -> OpenPhase {
        OpenPhase { kappa, start: t, ratios_start: self.ratios(m, i, kappa) }
    }

    pub fn hierarchy(&self) -> &HierarchyTable {
        &self.h
    }

    /// Updates position `i` after the matrix reached time `t`.
    pub fn observe_position(&mut self, m: &FrequencyMatrix, i: usize, t: u64) {
        let psi = self.h.phase_state(m, i).psi;
        let old = self.current[i].kappa;
        if psi == old {
            return;
        }
        // Zero-frequency values are never sampled, so psi can only grow.
        debug_assert!(psi > old, "psi decreased at position {i}");
        let ratios_end = self.ratios(m, i, old);
        let open = &self.current[i];
        self.finished.push(PhaseRecord {
            position: i,
            kappa: old,
            start: open.start,
            end: t,
            skipped: false,
            closed: true,
            ratios_start: open.ratios_start.clone(),
            ratios_end,
        });
        for kappa in old + 1..psi.min(self.h.kappa_star()) {
            let ratios = self.ratios(m, i, kappa);
            self.finished.push(PhaseRecord {
                position: i,
                kappa,
                start: t,
                end: t,
                skipped: true,
                closed: true,
                ratios_start: ratios.clone(),
                ratios_end: ratios,
            });
        }
        self.current[i] = self.open(m, i, psi, t);
    }

    /// Updates the positions touched by `step`; `m` is the matrix after it.
    pub fn observe(&mut self, step: &Step, m: &FrequencyMatrix) {
        let t = step.t + 1;
        for i in 0..m.n() {
            if step.x1.values[i] != step.x2.values[i] {
                self.observe_position(m, i, t);
            }
        }
    }

    /// Closes every open phase at time `t` and returns all records sorted by
    /// position, then phase.
    pub fn finish(mut self, m: &FrequencyMatrix, t: u64) -> Vec<PhaseRecord> {
        let kappa_star = self.h.kappa_star();
        for i in 0..m.n() {
            let open = self.current[i].clone();
            if open.kappa < kappa_star {
                self.finished.push(PhaseRecord {
                    position: i,
                    kappa: open.kappa,
                    start: open.start,
                    end: t,
                    skipped: false,
                    closed: false,
                    ratios_end: self.ratios(m, i, open.kappa),
                    ratios_start: open.ratios_start,
                });
            }
        }
        self.finished.sort_by_key(|p| (p.position, p.kappa));
        self.finished
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithm::{run, RunConfig, TraceLevel};
    use crate::fitness::ObjectiveKind;

    #[test]
    fn rest_sum_examples() {
        assert_eq!(rest_sums(&[1, 2, 3], &[0, 2, 1], 1), (4, 1, 3));
        assert_eq!(rest_sums(&[1, 2, 3], &[0, 2, 1], 0), (5, 3, 2));
        assert_eq!(rest_sums(&[3, 1, 4], &[3, 1, 4], 2).2, 0);
        assert_eq!(rest_sums(&[5], &[2], 0), (0, 0, 0));
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify(4, 2, false), StepClass::Biased);
        assert_eq!(classify(-4, 2, false), StepClass::Biased);
        assert_eq!(classify(1, 2, false), StepClass::RandomWalk);
        assert_eq!(classify(0, 0, false), StepClass::RandomWalk);
        // Equal magnitudes with opposite signs give an overall tie.
        assert_eq!(classify(2, -2, true), StepClass::RandomWalk);
        assert_eq!(classify(2, 2, false), StepClass::RandomWalk);
        assert_eq!(classify(5, 0, true), StepClass::RandomWalk);
    }

    #[test]
    fn large_biased_examples() {
        let h = HierarchyTable::build(10).unwrap();
        assert_eq!(detect_large_biased(&[7], &[1], 0, 1, StepClass::Biased, &h), Some(0));
        assert_eq!(detect_large_biased(&[7], &[1], 0, 1, StepClass::RandomWalk, &h), None);
        // K_1 = [3..4] against K_2 = [5..6]: K_2 is not inside S_3 = [7..9].
        assert_eq!(detect_large_biased(&[5], &[3], 0, 1, StepClass::Biased, &h), None);
        // Loser in K_1, winner in S_3 = [7..9].
        assert_eq!(detect_large_biased(&[3], &[9], 0, 2, StepClass::Biased, &h), Some(1));
        // Loser in a block too high for a kappa + 2 <= kappa* partner.
        assert_eq!(detect_large_biased(&[9], &[8], 0, 1, StepClass::Biased, &h), None);
    }

    #[test]
    fn retention_factor_values() {
        assert_eq!(retention_factor(7), Exact::new(216, 343));
        let rec = PhaseRecord {
            position: 0,
            kappa: 0,
            start: 0,
            end: 5,
            skipped: false,
            closed: true,
            ratios_start: vec![Some(Exact::new(1, 2)), None],
            ratios_end: vec![Some(Exact::new(1, 4)), Some(Exact::new(1, 1))],
        };
        assert_eq!(rec.retained(Exact::new(1, 2)), Some(true));
        assert_eq!(rec.retained(Exact::new(3, 4)), Some(false));
    }

    #[test]
    fn decompose_rejects_mass_traces() {
        let config = RunConfig {
            n: 3,
            r: 4,
            k: 8,
            objective: ObjectiveKind::GOneMax,
            max_iterations: 5,
            seed: 1,
            trace_level: TraceLevel::MassesOnly,
        };
        let result = run(&config).unwrap();
        let trace = result.trace.unwrap();
        assert_eq!(decompose(&trace, 0, 2..4, 0, 1), Err(Error::MissingTrace("full step records")));
    }
}
