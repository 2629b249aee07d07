//! The r-cGA loop: sample two individuals, compare them, and move `1/K` of
//! mass per position from the loser's value to the winner's value.

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitness::{Objective, ObjectiveKind};
use crate::hierarchy::HierarchyTable;
use crate::instrumentation::{record_step, MassRecord, StepRecord};
use crate::matrix::FrequencyMatrix;
use crate::{seeded_rng, Rng, RNG_ALGORITHM};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Individual {
    pub values: Vec<usize>,
    pub fitness: u64,
}

impl Individual {
    pub fn new(values: Vec<usize>, objective: &Objective) -> Result<Self> {
        let fitness = objective.evaluate(&values)?;
        Ok(Self { values, fitness })
    }
}

/// Samples every position independently from its row of `m`, in position
/// order.
pub fn sample_individual(m: &FrequencyMatrix, rng: &mut Rng, objective: &Objective) -> Individual {
    let values: Vec<usize> = (0..m.n()).map(|i| m.sample_value(i, rng)).collect();
    let fitness = objective.evaluate_unchecked(&values);
    Individual { values, fitness }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Competition {
    pub winner: Individual,
    pub loser: Individual,
    pub tied: bool,
    /// 1 if the first argument of [`compete`] won, 2 otherwise.
    pub winner_index: u8,
}

/// Orders two individuals by fitness. Equal fitness is broken by one fresh
/// uniform bit from `rng`; no randomness is consumed otherwise.
pub fn compete(x1: Individual, x2: Individual, rng: &mut Rng) -> Competition {
    let tied = x1.fitness == x2.fitness;
    let first_wins = if tied { rng.gen::<bool>() } else { x1.fitness > x2.fitness };
    if first_wins {
        Competition { winner: x1, loser: x2, tied, winner_index: 1 }
    } else {
        Competition { winner: x2, loser: x1, tied, winner_index: 2 }
    }
}

/// Applies `p[i][j] += (1{winner_i = j} - 1{loser_i = j}) / K` to every row.
///
/// The whole update is validated before any row changes, so a corrupted
/// input leaves `m` untouched.
pub fn update(m: &mut FrequencyMatrix, winner: &[usize], loser: &[usize]) -> Result<()> {
    for x in [winner, loser] {
        if x.len() != m.n() {
            return Err(Error::LengthMismatch { expected: m.n(), got: x.len() });
        }
    }
    for (i, (&w, &l)) in winner.iter().zip(loser).enumerate() {
        if w >= m.r() || l >= m.r() {
            return Err(Error::ValueOutOfRange { position: i, value: w.max(l), max: m.r() - 1 });
        }
        if w != l && m.count(i, l) == 0 {
            return Err(Error::Corrupted(format!("loser value {l} at position {i} has zero frequency")));
        }
    }
    for (i, (&w, &l)) in winner.iter().zip(loser).enumerate() {
        m.shift(i, w, l)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceLevel {
    #[default]
    None,
    /// Suffix-set masses of every position after every iteration.
    MassesOnly,
    /// Both samples of every iteration plus per-position step analysis.
    Full,
}

impl FromStr for TraceLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "masses-only" => Ok(Self::MassesOnly),
            "full" => Ok(Self::Full),
            _ => Err(Error::InvalidParameter(format!("unknown trace level {s:?}"))),
        }
    }
}

impl fmt::Display for TraceLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::None => "none",
            Self::MassesOnly => "masses-only",
            Self::Full => "full",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub n: usize,
    pub r: usize,
    pub k: u64,
    pub objective: ObjectiveKind,
    pub max_iterations: u64,
    pub seed: u64,
    pub trace_level: TraceLevel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Trace {
    Masses { kappa_star: usize, initial: MassRecord, records: Vec<MassRecord> },
    Full { objective: Objective, initial: FrequencyMatrix, records: Vec<StepRecord> },
}

impl Trace {
    pub fn len(&self) -> usize {
        match self {
            Self::Masses { records, .. } => records.len(),
            Self::Full { records, .. } => records.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn step_records(&self) -> Option<&[StepRecord]> {
        match self {
            Self::Full { records, .. } => Some(records),
            Self::Masses { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunResult {
    pub iterations_used: u64,
    pub optimum_found: bool,
    pub final_matrix: FrequencyMatrix,
    pub trace: Option<Trace>,
    pub seed: u64,
    pub rng_algorithm: String,
}

/// Outcome of one iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    /// Iteration index; samples were drawn from the matrix at time `t`.
    pub t: u64,
    /// Samples in draw order.
    pub x1: Individual,
    pub x2: Individual,
    pub winner_index: u8,
    pub tied: bool,
    pub optimum_sampled: bool,
}

impl Step {
    pub fn winner(&self) -> &Individual {
        if self.winner_index == 1 {
            &self.x1
        } else {
            &self.x2
        }
    }

    pub fn loser(&self) -> &Individual {
        if self.winner_index == 1 {
            &self.x2
        } else {
            &self.x1
        }
    }
}

/// A single r-cGA state machine, advanced one iteration at a time.
#[derive(Debug, Clone)]
pub struct Rcga {
    objective: Objective,
    matrix: FrequencyMatrix,
    rng: Rng,
    t: u64,
}

impl Rcga {
    pub fn new(objective: Objective, k: u64, seed: u64) -> Result<Self> {
        let matrix = FrequencyMatrix::new(objective.n, objective.r, k)?;
        Ok(Self::from_matrix(objective, matrix, seed))
    }

    /// Starts from an arbitrary valid matrix (e.g. a constructed state for
    /// one-step estimates).
    pub fn from_matrix(objective: Objective, matrix: FrequencyMatrix, seed: u64) -> Self {
        Self { objective, matrix, rng: seeded_rng(seed), t: 0 }
    }

    pub fn matrix(&self) -> &FrequencyMatrix {
        &self.matrix
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    /// Number of completed iterations, i.e. the time index of the current
    /// matrix.
    pub fn time(&self) -> u64 {
        self.t
    }

    pub fn step(&mut self) -> Result<Step> {
        let x1 = sample_individual(&self.matrix, &mut self.rng, &self.objective);
        let x2 = sample_individual(&self.matrix, &mut self.rng, &self.objective);
        let optimum = self.objective.optimum_value();
        let optimum_sampled = optimum.is_some_and(|o| x1.fitness == o || x2.fitness == o);
        let c = compete(x1, x2, &mut self.rng);
        update(&mut self.matrix, &c.winner.values, &c.loser.values)?;
        let t = self.t;
        self.t += 1;
        let (x1, x2) = if c.winner_index == 1 { (c.winner, c.loser) } else { (c.loser, c.winner) };
        Ok(Step { t, x1, x2, winner_index: c.winner_index, tied: c.tied, optimum_sampled })
    }
}

/// Runs the r-cGA until an optimal individual is sampled or
/// `max_iterations` iterations have been executed.
pub fn run(config: &RunConfig) -> Result<RunResult> {
    if config.max_iterations == 0 {
        return Err(Error::InvalidParameter("max_iterations must be at least 1".into()));
    }
    let objective = Objective::new(config.objective, config.n, config.r)?;
    let mut rcga = Rcga::new(objective, config.k, config.seed)?;
    let hierarchy = if config.r >= 3 { Some(HierarchyTable::build(config.r)?) } else { None };

    let mut trace = match config.trace_level {
        TraceLevel::None => None,
        TraceLevel::MassesOnly => {
            let h =
                hierarchy.as_ref().ok_or_else(|| Error::InvalidParameter("masses-only traces need r >= 3".into()))?;
            Some(Trace::Masses {
                kappa_star: h.kappa_star(),
                initial: MassRecord::capture(0, rcga.matrix(), h),
                records: Vec::new(),
            })
        }
        TraceLevel::Full => Some(Trace::Full { objective, initial: rcga.matrix().clone(), records: Vec::new() }),
    };

    let mut optimum_found = false;
    while rcga.time() < config.max_iterations {
        let step = rcga.step()?;
        match &mut trace {
            Some(Trace::Masses { records, .. }) => {
                let h = hierarchy.as_ref().expect("checked above");
                records.push(MassRecord::capture(rcga.time(), rcga.matrix(), h));
            }
            Some(Trace::Full { records, .. }) => {
                records.push(record_step(&objective, hierarchy.as_ref(), &step));
            }
            None => {}
        }
        if step.optimum_sampled {
            optimum_found = true;
            break;
        }
    }

    Ok(RunResult {
        iterations_used: rcga.time(),
        optimum_found,
        final_matrix: rcga.matrix().clone(),
        trace,
        seed: config.seed,
        rng_algorithm: RNG_ALGORITHM.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn individual(values: Vec<usize>, fitness: u64) -> Individual {
        Individual { values, fitness }
    }

    #[test]
    fn strict_order_wins() {
        let mut rng = seeded_rng(1);
        let c = compete(individual(vec![0], 7), individual(vec![1], 3), &mut rng);
        assert_eq!((c.winner.fitness, c.tied, c.winner_index), (7, false, 1));
        let c = compete(individual(vec![0], 3), individual(vec![1], 7), &mut rng);
        assert_eq!((c.winner.fitness, c.tied, c.winner_index), (7, false, 2));
    }

    #[test]
    fn ties_are_fair_coins() {
        let mut rng = seeded_rng(2);
        let reps = 100_000;
        let first = (0..reps)
            .filter(|_| {
                let c = compete(individual(vec![0], 5), individual(vec![1], 5), &mut rng);
                assert!(c.tied);
                c.winner.values == vec![0]
            })
            .count();
        let share = first as f64 / reps as f64;
        assert!((share - 0.5).abs() <= 0.01, "share {share}");
    }

    #[test]
    fn update_examples() {
        let mut m = FrequencyMatrix::new(1, 5, 10).unwrap();
        update(&mut m, &[4], &[0]).unwrap();
        assert_eq!(m.row(0), &[1, 2, 2, 2, 3]);
        update(&mut m, &[3], &[3]).unwrap();
        assert_eq!(m.row(0), &[1, 2, 2, 2, 3]);

        let mut m = FrequencyMatrix::from_counts(1, 5, 10, vec![0, 10, 0, 0, 0]).unwrap();
        update(&mut m, &[1], &[1]).unwrap();
        assert_eq!(m.row(0), &[0, 10, 0, 0, 0]);
    }

    #[test]
    fn corrupt_update_leaves_matrix_untouched() {
        let mut m = FrequencyMatrix::from_counts(2, 2, 2, vec![1, 1, 0, 2]).unwrap();
        let before = m.clone();
        assert!(matches!(update(&mut m, &[1, 1], &[0, 0]), Err(Error::Corrupted(_))));
        assert_eq!(m, before);
        assert!(update(&mut m, &[1], &[0]).is_err());
    }

    #[test]
    fn binary_single_position_always_succeeds() {
        for seed in 0..100 {
            let config = RunConfig {
                n: 1,
                r: 2,
                k: 2,
                objective: ObjectiveKind::GOneMax,
                max_iterations: 10_000,
                seed,
                trace_level: TraceLevel::None,
            };
            let result = run(&config).unwrap();
            assert!(result.optimum_found, "seed {seed}");
            assert!(result.iterations_used >= 1);
        }
    }

    #[test]
    fn constant_objective_runs_to_budget() {
        let config = RunConfig {
            n: 4,
            r: 3,
            k: 6,
            objective: ObjectiveKind::Constant,
            max_iterations: 100,
            seed: 3,
            trace_level: TraceLevel::Full,
        };
        let result = run(&config).unwrap();
        assert!(!result.optimum_found);
        assert_eq!(result.iterations_used, 100);
        let records = result.trace.as_ref().unwrap().step_records().unwrap();
        assert_eq!(records.len(), 100);
        assert!(records.iter().all(|s| s.tied));
    }

    #[test]
    fn runs_are_reproducible() {
        let config = RunConfig {
            n: 6,
            r: 4,
            k: 8,
            objective: ObjectiveKind::GOneMax,
            max_iterations: 500,
            seed: 42,
            trace_level: TraceLevel::Full,
        };
        let a = run(&config).unwrap();
        let b = run(&config).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rng_algorithm, RNG_ALGORITHM);
        let c = run(&RunConfig { seed: 43, ..config }).unwrap();
        assert_ne!(a.trace, c.trace);
    }

    #[test]
    fn rejects_invalid_parameters() {
        let config = RunConfig {
            n: 3,
            r: 5,
            k: 22,
            objective: ObjectiveKind::GOneMax,
            max_iterations: 10,
            seed: 0,
            trace_level: TraceLevel::None,
        };
        assert!(matches!(run(&config), Err(Error::IllBehavedK { .. })));
        assert!(run(&RunConfig { k: 20, max_iterations: 0, ..config.clone() }).is_err());
        let masses_binary = RunConfig { r: 2, k: 2, trace_level: TraceLevel::MassesOnly, ..config };
        assert!(run(&masses_binary).is_err());
    }
}
