//! Experiment campaigns for the r-valued compact genetic algorithm.
//!
//! A campaign is described by a TOML [`ExperimentConfig`], executed by
//! [`execute`] into an in-memory [`Outcome`], and written with
//! [`Outcome::write`]. Nothing touches the file system until the campaign
//! has finished, so a rejected config leaves no artifacts behind.

pub mod config;
pub mod error;
pub mod report;
pub mod studies;

use std::fs;
use std::path::{Path, PathBuf};

pub use config::{Acceptance, Cell, CheckConfig, ExperimentConfig, ExperimentKind, Grid, IterationRule, KRule};
pub use error::{HarnessError, Result, EXIT_ACCEPTANCE, EXIT_SUCCESS};
pub use report::{Artifact, Summary};
pub use studies::{DriftRow, PhaseReplica, RunRow, ScalingRow};

use report::*;
use studies::*;

/// Command-line overrides.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub emit_plots: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcceptanceCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub kind: ExperimentKind,
    pub out: PathBuf,
    pub summary: Summary,
    pub artifacts: Vec<Artifact>,
    pub checks: Vec<AcceptanceCheck>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            EXIT_SUCCESS
        } else {
            EXIT_ACCEPTANCE
        }
    }

    /// Writes every artifact plus `summary.txt` into `self.out`.
    pub fn write(&self) -> Result<()> {
        fs::create_dir_all(&self.out).map_err(HarnessError::io(&self.out))?;
        for a in self
            .artifacts
            .iter()
            .chain(std::iter::once(&Artifact { name: "summary.txt".into(), contents: self.summary.render() }))
        {
            let path = self.out.join(&a.name);
            fs::write(&path, &a.contents).map_err(HarnessError::io(path))?;
        }
        Ok(())
    }
}

/// Resolves the experiment kind from the subcommand and the config's own
/// `kind`, which must agree when both are present.
pub fn resolve_kind(subcommand: Option<ExperimentKind>, config: &ExperimentConfig) -> Result<ExperimentKind> {
    match (subcommand, config.kind) {
        (Some(a), Some(b)) if a != b => Err(HarnessError::Config(format!(
            "config declares kind = {b:?} but the {a} subcommand was used",
            b = b.name()
        ))),
        (Some(a), _) | (None, Some(a)) => Ok(a),
        (None, None) => Err(HarnessError::Config("experiment kind missing".into())),
    }
}

/// Runs a campaign, honoring `--threads` with a dedicated pool.
pub fn execute(kind: ExperimentKind, mut config: ExperimentConfig, opts: &Options) -> Result<Outcome> {
    if let Some(seed) = opts.seed {
        config.base_seed = seed;
    }
    let out =
        opts.out.clone().or_else(|| config.out.clone()).unwrap_or_else(|| PathBuf::from("results").join(kind.name()));
    let plots = opts.emit_plots || config.emit_plots;
    match opts.threads {
        Some(0) => Err(HarnessError::Config("--threads must be at least 1".into())),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
            pool.install(|| dispatch(kind, &config, out, plots))
        }
        None => dispatch(kind, &config, out, plots),
    }
}

/// Loads, executes and writes; returns the process exit status.
pub fn run_file(subcommand: Option<ExperimentKind>, path: &Path, opts: &Options) -> Result<Outcome> {
    let config = ExperimentConfig::load(path)?;
    let kind = resolve_kind(subcommand, &config)?;
    let outcome = execute(kind, config, opts)?;
    outcome.write()?;
    Ok(outcome)
}

fn dispatch(kind: ExperimentKind, config: &ExperimentConfig, out: PathBuf, plots: bool) -> Result<Outcome> {
    let mut summary = Summary::new(kind.name(), config.base_seed);
    summary.push("objective", config.objective.name());
    let mut artifacts = Vec::new();
    let mut checks = Vec::new();
    let acc = &config.acceptance;
    match kind {
        ExperimentKind::Run => {
            let rows = if config.trace_level == rcga_core::TraceLevel::None {
                run_study(config)?
            } else {
                let traced = traced_runs(config)?;
                let mut rows = Vec::with_capacity(traced.len());
                for (row, result) in traced {
                    let name = format!("trace_n{}_r{}_rep{:03}.json", row.cell.n, row.cell.r, row.replica);
                    let contents = serde_json::to_string(&result).expect("run results serialize");
                    artifacts.push(Artifact { name, contents });
                    rows.push(row);
                }
                rows
            };
            artifacts.insert(0, runs_csv("runs.csv", &rows)?);
            push_run_summary(&mut summary, &rows);
            success_check(&mut checks, acc, &rows);
        }
        ExperimentKind::Scaling => {
            let (rows, table) = scaling_study(config)?;
            artifacts.push(runs_csv("scaling.csv", &rows)?);
            artifacts.push(scaling_summary_csv(&table)?);
            if plots {
                artifacts.push(scaling_svg(&table));
            }
            push_run_summary(&mut summary, &rows);
            let spread = normalized_spread(&table);
            summary.push("cells", table.len());
            summary.push("normalized_spread", spread);
            summary.push("flagged_cells", table.iter().filter(|r| r.flagged).count());
            success_check(&mut checks, acc, &rows);
            if let Some(max) = acc.max_normalized_spread {
                checks.push(AcceptanceCheck {
                    name: "max_normalized_spread".into(),
                    passed: spread <= max,
                    detail: format!("spread {spread} vs limit {max}"),
                });
            }
        }
        ExperimentKind::Drift => {
            let study = drift_study(config)?;
            artifacts.push(drift_csv(&study.rows)?);
            for (cell, s) in &study.series {
                artifacts.push(series_csv(cell, s)?);
            }
            let runs: Vec<RunRow> = study.rows.iter().map(|d| d.run.clone()).collect();
            push_run_summary(&mut summary, &runs);
            let max_biased = study.rows.iter().map(|d| d.biased_steps).max().unwrap_or(0);
            summary.push("biased_steps_total", study.rows.iter().map(|d| d.biased_steps).sum::<u64>());
            summary.push("random_walk_steps_total", study.rows.iter().map(|d| d.random_walk_steps).sum::<u64>());
            summary.push("large_biased_steps_total", study.rows.iter().map(|d| d.large_biased_steps).sum::<u64>());
            summary.push("max_biased_steps", max_biased);
            success_check(&mut checks, acc, &runs);
            if let Some(limit) = acc.max_biased_steps {
                checks.push(AcceptanceCheck {
                    name: "max_biased_steps".into(),
                    passed: max_biased <= limit,
                    detail: format!("max biased steps {max_biased} vs limit {limit}"),
                });
            }
        }
        ExperimentKind::Phases => {
            let replicas = phase_study(config)?;
            for p in &replicas {
                artifacts.push(phases_csv(p)?);
            }
            artifacts.push(phase_ratios_csv(&replicas)?);
            let runs: Vec<RunRow> = replicas.iter().map(|p| p.run.clone()).collect();
            push_run_summary(&mut summary, &runs);
            let (kept, total) = retention_totals(&replicas);
            let fraction = if total == 0 { 1.0 } else { kept as f64 / total as f64 };
            summary.push("phases_total", replicas.iter().map(|p| p.records.len()).sum::<usize>());
            summary.push("phases_skipped", replicas.iter().flat_map(|p| &p.records).filter(|r| r.skipped).count());
            summary.push("retention_pairs", total);
            summary.push("retention_pairs_retained", kept);
            summary.push("retention_fraction", fraction);
            success_check(&mut checks, acc, &runs);
            if let Some(min) = acc.min_retention_fraction {
                checks.push(AcceptanceCheck {
                    name: "min_retention_fraction".into(),
                    passed: fraction >= min,
                    detail: format!("retention fraction {fraction} vs minimum {min}"),
                });
            }
        }
        ExperimentKind::Verify => {
            let reports = verify_study(config)?;
            artifacts.push(verify_csv(&reports)?);
            summary.push("significance", config.verify.significance);
            summary.push("checks", reports.len());
            summary.push("violations", reports.iter().filter(|r| !r.satisfied()).count());
            for (idx, r) in reports.iter().enumerate() {
                summary.push(format!("check.{idx}.{}", r.oracle), r.status.name());
                checks.push(AcceptanceCheck {
                    name: format!("{}#{idx}", r.oracle),
                    passed: r.satisfied(),
                    detail: format!("bound {} empirical {:?} status {}", r.bound, r.empirical, r.status),
                });
            }
        }
    }
    summary.push("acceptance_checks", checks.len());
    summary.push("acceptance_passed", checks.iter().all(|c| c.passed));
    Ok(Outcome { kind, out, summary, artifacts, checks })
}

fn push_run_summary(summary: &mut Summary, rows: &[RunRow]) {
    let found = rows.iter().filter(|r| r.found).count();
    summary.push("replicas", rows.len());
    summary.push("optimum_found_count", found);
    summary.push("optimum_found", found == rows.len());
    summary.push("iterations_total", rows.iter().map(|r| r.iterations).sum::<u64>());
}

fn success_check(checks: &mut Vec<AcceptanceCheck>, acc: &Acceptance, rows: &[RunRow]) {
    let Some(min) = acc.min_success_fraction else { return };
    let mut worst = 1.0f64;
    let mut start = 0;
    while start < rows.len() {
        let cell = rows[start].cell;
        let group: Vec<&RunRow> = rows[start..].iter().take_while(|r| r.cell == cell).collect();
        worst = worst.min(group.iter().filter(|r| r.found).count() as f64 / group.len() as f64);
        start += group.len();
    }
    checks.push(AcceptanceCheck {
        name: "min_success_fraction".into(),
        passed: worst >= min,
        detail: format!("lowest cell success fraction {worst} vs minimum {min}"),
    });
}
