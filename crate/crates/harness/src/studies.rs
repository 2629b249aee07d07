//! Experiment campaigns. Each study returns typed rows; rendering to CSV
//! lives in [`crate::report`].

use std::ops::Range;

use rayon::prelude::*;
use rcga_core::instrumentation::{decompose, record_step, retention_factor, PhaseRecord, PhaseTracker};
use rcga_core::oracles::verify::{
    verify_biased_window, verify_convolution, verify_drift, verify_multiplicative_drift, verify_neutral_concentration,
    verify_reinforced_bernoulli, verify_variance, BiasedWindowCheck, ConfinedLayout, ConvolutionCheck, DriftCheck,
    MultDriftCheck, NeutralCheck, ReinforcedCheck, VarianceCheck,
};
use rcga_core::oracles::{adak_witt_bound, rcga_on_gom_scale, BoundReport};
use rcga_core::{
    run, DecomposedSeries, Exact, HierarchyTable, Objective, Rcga, RunConfig, StepClass, Trace, TraceLevel,
};

use crate::config::{Cell, CheckConfig, ExperimentConfig};
use crate::error::{HarnessError, Result};

/// Oracle names accepted in `[[verify.checks]]`.
pub const ORACLES: [&str; 7] = [
    "convolution",
    "variance",
    "biased-window",
    "neutral-concentration",
    "reinforced-bernoulli",
    "drift",
    "multiplicative-drift",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunRow {
    pub cell: Cell,
    pub replica: u64,
    pub seed: u64,
    pub iterations: u64,
    pub found: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub n: usize,
    pub r: usize,
    pub k: u64,
    pub replicas: u64,
    pub median_iterations: f64,
    pub q1: f64,
    pub q3: f64,
    pub success_fraction: f64,
    /// `median / (K sqrt(n) ln n ln r)`.
    pub normalized: f64,
    pub comparator: f64,
    /// Some replica hit the iteration budget without sampling the optimum.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DriftRow {
    pub run: RunRow,
    /// `(iteration, position)` pairs classified biased.
    pub biased_steps: u64,
    pub random_walk_steps: u64,
    pub large_biased_steps: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftStudy {
    pub rows: Vec<DriftRow>,
    /// Decomposition of replica 0 of each cell, position 0, upper half of
    /// the values.
    pub series: Vec<(Cell, DecomposedSeries)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseReplica {
    pub run: RunRow,
    pub kappa_star: usize,
    pub records: Vec<PhaseRecord>,
}

impl PhaseReplica {
    /// `(retained, applicable)` phase counts at factor `(1 - 1/kappa*)^3`.
    pub fn retention_counts(&self) -> (u64, u64) {
        let factor = retention_factor(self.kappa_star);
        self.records
            .iter()
            .filter_map(|p| p.retained(factor))
            .fold((0, 0), |(ok, all), kept| (ok + u64::from(kept), all + 1))
    }
}

fn jobs(config: &ExperimentConfig, cells: &[Cell]) -> Vec<(Cell, u64)> {
    cells.iter().flat_map(|&c| (0..config.repetitions).map(move |rep| (c, rep))).collect()
}

/// Values `[r/2 .. r)`.
pub fn upper_half(r: usize) -> Range<usize> {
    r / 2..r
}

/// One row per replica, sorted by cell then replica index.
pub fn run_study(config: &ExperimentConfig) -> Result<Vec<RunRow>> {
    let cells = config.cells()?;
    warn_range(&cells);
    jobs(config, &cells)
        .into_par_iter()
        .map(|(cell, replica)| {
            let seed = config.seed(replica);
            let result = run(&RunConfig {
                n: cell.n,
                r: cell.r,
                k: cell.k,
                objective: config.objective,
                max_iterations: cell.max_iterations,
                seed,
                trace_level: TraceLevel::None,
            })?;
            Ok(RunRow { cell, replica, seed, iterations: result.iterations_used, found: result.optimum_found })
        })
        .collect()
}

/// Full run results for `trace_level != none` single runs.
pub fn traced_runs(config: &ExperimentConfig) -> Result<Vec<(RunRow, rcga_core::RunResult)>> {
    let cells = config.cells()?;
    jobs(config, &cells)
        .into_par_iter()
        .map(|(cell, replica)| {
            let seed = config.seed(replica);
            let result = run(&RunConfig {
                n: cell.n,
                r: cell.r,
                k: cell.k,
                objective: config.objective,
                max_iterations: cell.max_iterations,
                seed,
                trace_level: config.trace_level,
            })?;
            let row = RunRow { cell, replica, seed, iterations: result.iterations_used, found: result.optimum_found };
            Ok((row, result))
        })
        .collect()
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Aggregates replica rows into one row per cell, in cell order.
pub fn summarize_scaling(rows: &[RunRow]) -> Vec<ScalingRow> {
    let mut out: Vec<ScalingRow> = Vec::new();
    let mut start = 0;
    while start < rows.len() {
        let cell = rows[start].cell;
        let end = start + rows[start..].iter().take_while(|r| r.cell == cell).count();
        let group = &rows[start..end];
        let mut its: Vec<f64> = group.iter().map(|r| r.iterations as f64).collect();
        its.sort_by(f64::total_cmp);
        let found = group.iter().filter(|r| r.found).count();
        let median = quantile(&its, 0.5);
        out.push(ScalingRow {
            n: cell.n,
            r: cell.r,
            k: cell.k,
            replicas: group.len() as u64,
            median_iterations: median,
            q1: quantile(&its, 0.25),
            q3: quantile(&its, 0.75),
            success_fraction: found as f64 / group.len() as f64,
            normalized: median / rcga_on_gom_scale::<f64>(cell.n, cell.r, cell.k),
            comparator: adak_witt_bound::<f64>(cell.n, cell.r, cell.k).unwrap_or(f64::NAN),
            flagged: found < group.len(),
        });
        start = end;
    }
    out
}

pub fn scaling_study(config: &ExperimentConfig) -> Result<(Vec<RunRow>, Vec<ScalingRow>)> {
    let rows = run_study(config)?;
    let summary = summarize_scaling(&rows);
    Ok((rows, summary))
}

/// Largest over smallest normalized median across cells.
pub fn normalized_spread(rows: &[ScalingRow]) -> f64 {
    let max = rows.iter().map(|r| r.normalized).fold(f64::NEG_INFINITY, f64::max);
    let min = rows.iter().map(|r| r.normalized).fold(f64::INFINITY, f64::min);
    max / min
}

pub fn drift_study(config: &ExperimentConfig) -> Result<DriftStudy> {
    let cells = config.cells()?;
    warn_range(&cells);
    let results: Vec<(DriftRow, Option<(Cell, DecomposedSeries)>)> = jobs(config, &cells)
        .into_par_iter()
        .map(|(cell, replica)| drift_replica(config, cell, replica))
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(results.len());
    let mut series = Vec::new();
    for (row, s) in results {
        rows.push(row);
        series.extend(s);
    }
    Ok(DriftStudy { rows, series })
}

fn drift_replica(
    config: &ExperimentConfig,
    cell: Cell,
    replica: u64,
) -> Result<(DriftRow, Option<(Cell, DecomposedSeries)>)> {
    let seed = config.seed(replica);
    let objective = Objective::new(config.objective, cell.n, cell.r)?;
    let h = if cell.r >= 3 { Some(HierarchyTable::build(cell.r)?) } else { None };
    let mut rcga = Rcga::new(objective, cell.k, seed)?;
    let keep = replica == 0;
    let initial = rcga.matrix().clone();
    let mut records = Vec::new();
    let (mut biased, mut random_walk, mut large) = (0u64, 0u64, 0u64);
    let mut found = false;
    while rcga.time() < cell.max_iterations && !found {
        let step = rcga.step()?;
        found = step.optimum_sampled;
        let rec = record_step(&objective, h.as_ref(), &step);
        for p in &rec.positions {
            match p.class {
                StepClass::Biased => biased += 1,
                StepClass::RandomWalk => random_walk += 1,
            }
            large += u64::from(p.large_biased.is_some());
        }
        if keep {
            records.push(rec);
        }
    }
    let iterations = rcga.time();
    let series = if keep {
        let trace = Trace::Full { objective, initial, records };
        Some((cell, decompose(&trace, 0, upper_half(cell.r), 0, iterations)?))
    } else {
        None
    };
    let run = RunRow { cell, replica, seed, iterations, found };
    Ok((DriftRow { run, biased_steps: biased, random_walk_steps: random_walk, large_biased_steps: large }, series))
}

pub fn phase_study(config: &ExperimentConfig) -> Result<Vec<PhaseReplica>> {
    let cells = config.cells()?;
    if let Some(c) = cells.iter().find(|c| c.r < 3) {
        return Err(HarnessError::Precondition(format!("phase study needs r >= 3, got r = {}", c.r)));
    }
    warn_range(&cells);
    jobs(config, &cells)
        .into_par_iter()
        .map(|(cell, replica)| {
            let seed = config.seed(replica);
            let objective = Objective::new(config.objective, cell.n, cell.r)?;
            let h = HierarchyTable::build(cell.r)?;
            let kappa_star = h.kappa_star();
            let mut rcga = Rcga::new(objective, cell.k, seed)?;
            let mut tracker = PhaseTracker::new(h, rcga.matrix());
            let mut found = false;
            while rcga.time() < cell.max_iterations && !found {
                let step = rcga.step()?;
                found = step.optimum_sampled;
                tracker.observe(&step, rcga.matrix());
            }
            let iterations = rcga.time();
            let records = tracker.finish(rcga.matrix(), iterations);
            let run = RunRow { cell, replica, seed, iterations, found };
            Ok(PhaseReplica { run, kappa_star, records })
        })
        .collect()
}

/// Sum of `(retained, applicable)` over all replicas.
pub fn retention_totals(replicas: &[PhaseReplica]) -> (u64, u64) {
    replicas.iter().map(PhaseReplica::retention_counts).fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

pub fn check_oracle_names(config: &ExperimentConfig) -> Result<()> {
    for c in &config.verify.checks {
        if !ORACLES.contains(&c.oracle.as_str()) {
            return Err(HarnessError::Config(format!(
                "unknown oracle {:?} (expected one of {})",
                c.oracle,
                ORACLES.join(", ")
            )));
        }
        if let Some(layout) = &c.layout {
            parse_layout(layout)?;
        }
    }
    Ok(())
}

fn parse_layout(s: &str) -> Result<ConfinedLayout> {
    match s {
        "uniform" => Ok(ConfinedLayout::Uniform),
        "two-point" => Ok(ConfinedLayout::TwoPoint),
        other => Err(HarnessError::Config(format!("unknown layout {other:?}"))),
    }
}

/// Runs every configured check in order.
pub fn verify_study(config: &ExperimentConfig) -> Result<Vec<BoundReport>> {
    check_oracle_names(config)?;
    config.verify.checks.iter().map(|c| run_check(c, config.verify.significance)).collect()
}

pub fn run_check(c: &CheckConfig, significance: f64) -> Result<BoundReport> {
    macro_rules! set {
        ($check:ident, $($field:ident <- $src:expr),* $(,)?) => {
            $(if let Some(v) = $src { $check.$field = v; })*
        };
    }
    let report = match c.oracle.as_str() {
        "convolution" => {
            let mut k = ConvolutionCheck::default();
            set!(k, instances <- c.samples, seed <- c.seed, max_m <- c.max_m, max_rho <- c.max_rho);
            verify_convolution(&k)
        }
        "variance" => {
            let mut k = VarianceCheck::default();
            set!(k, n <- c.n, r <- c.r, j_star <- c.j_star, samples <- c.samples, seed <- c.seed);
            k.slack = c.slack;
            if let Some(l) = &c.layout {
                k.layout = parse_layout(l)?;
            }
            verify_variance(&k)?
        }
        "biased-window" => {
            let mut k = BiasedWindowCheck { significance, ..Default::default() };
            set!(k, n <- c.n, r <- c.r, pairs <- c.samples, seed <- c.seed);
            if let Some(d) = c.delta {
                if d < 0.0 || d.fract() != 0.0 {
                    return Err(HarnessError::Config(format!(
                        "biased-window delta must be a non-negative integer, got {d}"
                    )));
                }
                k.delta = d as u64;
            }
            verify_biased_window(&k)?
        }
        "neutral-concentration" => {
            let mut k = NeutralCheck { significance, ..Default::default() };
            set!(k, n <- c.n, k <- c.k, t <- c.t, alpha <- c.alpha, runs <- c.samples, seed <- c.seed);
            if let Some(r) = c.r {
                k.r = r;
                k.values = upper_half(r);
            }
            verify_neutral_concentration(&k)?
        }
        "reinforced-bernoulli" => {
            let mut k = ReinforcedCheck { significance, ..Default::default() };
            set!(k, t <- c.t, p <- c.p, delta <- c.delta, b <- c.b, eta <- c.eta, trajectories <- c.samples, seed <- c.seed);
            k.rho = c.rho.unwrap_or(k.eta * k.t as f64);
            verify_reinforced_bernoulli(&k)?
        }
        "drift" => {
            let mut k = DriftCheck { significance, ..Default::default() };
            set!(k, n <- c.n, r <- c.r, kappa <- c.kappa, c_drift <- c.c_drift, iterations <- c.samples, seed <- c.seed);
            verify_drift(&k)?
        }
        "multiplicative-drift" => {
            let mut k = MultDriftCheck { significance, ..Default::default() };
            set!(k, x0 <- c.x0, x_min <- c.x_min, delta <- c.delta, gamma <- c.gamma, q <- c.q, trajectories <- c.samples, seed <- c.seed);
            verify_multiplicative_drift(&k)?
        }
        other => return Err(HarnessError::Config(format!("unknown oracle {other:?}"))),
    };
    Ok(report)
}

/// Exact ratio as `f64`.
pub fn ratio_f64(x: &Exact) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

fn warn_range(cells: &[Cell]) {
    for c in cells {
        let r6 = (c.r as f64).powi(6);
        if r6 > c.n as f64 {
            eprintln!("warning: r^6 = {r6} exceeds n = {} at r = {}; the runtime guarantee may not apply", c.n, c.r);
        }
    }
}
