//! Campaign configuration files (TOML).
//!
//! ```toml
//! kind = "scaling"
//! objective = "g-onemax"
//! n = [64, 128, 256]
//! r = 8
//! repetitions = 50
//! base_seed = 1000
//!
//! [k]
//! rule = "theorem"
//! c = 0.25
//!
//! [acceptance]
//! max_normalized_spread = 3.0
//! ```
//!
//! See `configs/` in the repository for one file per experiment kind.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rcga_core::oracles::{adak_witt_k, rcga_on_gom_scale, theorem_k, DEFAULT_SIGNIFICANCE};
use rcga_core::{ObjectiveKind, TraceLevel};
use serde::Deserialize;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Run,
    Scaling,
    Drift,
    Phases,
    Verify,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Run => "run",
            Self::Scaling => "scaling",
            Self::Drift => "drift",
            Self::Phases => "phases",
            Self::Verify => "verify",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A scalar or a list in the config file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    One(usize),
    Many(Vec<usize>),
}

impl Grid {
    pub fn values(&self) -> Vec<usize> {
        match self {
            Self::One(v) => vec![*v],
            Self::Many(v) => v.clone(),
        }
    }
}

/// How `K` is derived for a cell.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case", deny_unknown_fields)]
pub enum KRule {
    Explicit {
        value: u64,
        #[serde(default = "yes")]
        round_up: bool,
    },
    /// `c r sqrt(n) ln^2 n ln^2 r`.
    Theorem {
        #[serde(default = "default_c")]
        c: f64,
        #[serde(default = "yes")]
        round_up: bool,
    },
    /// `c r^2 sqrt(n) ln n`.
    AdakWitt {
        #[serde(default = "default_c")]
        c: f64,
        #[serde(default = "yes")]
        round_up: bool,
    },
}

impl Default for KRule {
    fn default() -> Self {
        Self::Theorem { c: default_c(), round_up: true }
    }
}

fn yes() -> bool {
    true
}

fn default_c() -> f64 {
    0.25
}

impl KRule {
    /// The raw (unrounded) value of the rule.
    pub fn raw(&self, n: usize, r: usize) -> f64 {
        match *self {
            Self::Explicit { value, .. } => value as f64,
            Self::Theorem { c, .. } => theorem_k(n, r, c),
            Self::AdakWitt { c, .. } => adak_witt_k(n, r, c),
        }
    }

    fn round_up(&self) -> bool {
        match *self {
            Self::Explicit { round_up, .. } | Self::Theorem { round_up, .. } | Self::AdakWitt { round_up, .. } => {
                round_up
            }
        }
    }

    /// A well-behaved `K >= raw`: the next multiple of `r` (at least `r`).
    /// With rounding disabled, a raw value that is not already such a
    /// multiple is a precondition failure.
    pub fn materialize(&self, n: usize, r: usize) -> Result<u64> {
        let raw = self.raw(n, r);
        if !raw.is_finite() || raw < 0.0 {
            return Err(HarnessError::Precondition(format!("K rule yields {raw} for n = {n}, r = {r}")));
        }
        let r64 = r as u64;
        let k = ((raw / r as f64).ceil() as u64).max(1) * r64;
        if !self.round_up() && (k as f64 != raw) {
            return Err(HarnessError::Precondition(format!(
                "K = {raw} is not a positive multiple of r = {r} and rounding is disabled"
            )));
        }
        Ok(k)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case", deny_unknown_fields)]
pub enum IterationRule {
    Explicit {
        value: u64,
    },
    /// `max(ceil(factor K sqrt(n) ln n ln r), min)`.
    TheoremMultiple {
        #[serde(default = "default_factor")]
        factor: f64,
        #[serde(default = "default_min_iterations")]
        min: u64,
    },
}

fn default_factor() -> f64 {
    50.0
}

fn default_min_iterations() -> u64 {
    10_000
}

impl Default for IterationRule {
    fn default() -> Self {
        Self::TheoremMultiple { factor: default_factor(), min: default_min_iterations() }
    }
}

impl IterationRule {
    pub fn materialize(&self, n: usize, r: usize, k: u64) -> u64 {
        match *self {
            Self::Explicit { value } => value,
            Self::TheoremMultiple { factor, min } => {
                let scale: f64 = rcga_on_gom_scale(n, r, k);
                ((factor * scale).ceil() as u64).max(min)
            }
        }
    }
}

/// Thresholds checked after the campaign; unset ones are skipped.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Acceptance {
    /// Minimum fraction of replicas (per cell) that sample the optimum.
    pub min_success_fraction: Option<f64>,
    /// Maximum ratio between the largest and smallest normalized median
    /// runtime across scaling cells.
    pub max_normalized_spread: Option<f64>,
    /// Minimum fraction of (position, phase) pairs whose ratios are retained.
    pub min_retention_fraction: Option<f64>,
    /// Maximum number of biased steps in any drift replica.
    pub max_biased_steps: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "default_significance")]
    pub significance: f64,
    #[serde(default)]
    pub checks: Vec<CheckConfig>,
}

fn default_significance() -> f64 {
    DEFAULT_SIGNIFICANCE
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { significance: default_significance(), checks: Vec::new() }
    }
}

/// One oracle sweep. Fields an oracle does not use are ignored; unset ones
/// take the oracle's defaults.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    pub oracle: String,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub n: Option<usize>,
    pub r: Option<usize>,
    pub k: Option<u64>,
    pub t: Option<u64>,
    pub delta: Option<f64>,
    pub j_star: Option<usize>,
    pub layout: Option<String>,
    pub slack: Option<f64>,
    pub alpha: Option<f64>,
    pub kappa: Option<usize>,
    pub c_drift: Option<f64>,
    pub p: Option<f64>,
    pub b: Option<f64>,
    pub rho: Option<f64>,
    pub eta: Option<f64>,
    pub q: Option<f64>,
    pub gamma: Option<f64>,
    pub x0: Option<f64>,
    pub x_min: Option<f64>,
    pub max_m: Option<usize>,
    pub max_rho: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Option<ExperimentKind>,
    #[serde(default = "default_objective")]
    pub objective: ObjectiveKind,
    #[serde(default = "default_grid")]
    pub n: Grid,
    #[serde(default = "default_grid")]
    pub r: Grid,
    #[serde(default = "default_repetitions")]
    pub repetitions: u64,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub trace_level: TraceLevel,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub k: KRule,
    #[serde(default)]
    pub max_iterations: IterationRule,
    #[serde(default)]
    pub acceptance: Acceptance,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub emit_plots: bool,
}

fn default_objective() -> ObjectiveKind {
    ObjectiveKind::GOneMax
}

fn default_grid() -> Grid {
    Grid::Many(Vec::new())
}

fn default_repetitions() -> u64 {
    1
}

impl FromStr for ExperimentConfig {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        let config: Self = toml::from_str(s).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }
}

/// One `(n, r, K)` combination of a campaign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub n: usize,
    pub r: usize,
    pub k: u64,
    pub max_iterations: u64,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        text.parse()
    }

    fn validate(&self) -> Result<()> {
        if !(self.verify.significance > 0.0 && self.verify.significance < 1.0) {
            return Err(HarnessError::Config("verify.significance must lie in (0, 1)".into()));
        }
        if let KRule::Theorem { c, .. } | KRule::AdakWitt { c, .. } = self.k {
            if c.is_nan() || c <= 0.0 {
                return Err(HarnessError::Config("k.c must be positive".into()));
            }
        }
        Ok(())
    }

    /// Checks the grid is usable for a replica-based experiment.
    pub fn check_grid(&self) -> Result<()> {
        let (ns, rs) = (self.n.values(), self.r.values());
        if ns.is_empty() || rs.is_empty() {
            return Err(HarnessError::Config("n and r grids must be non-empty".into()));
        }
        if ns.contains(&0) {
            return Err(HarnessError::Config("n must be positive".into()));
        }
        if rs.iter().any(|&r| r < 2) {
            return Err(HarnessError::Config("r must be at least 2".into()));
        }
        if self.repetitions == 0 {
            return Err(HarnessError::Config("repetitions must be at least 1".into()));
        }
        Ok(())
    }

    /// Cells in grid order (`n` outer, `r` inner), with `K` and the iteration
    /// budget materialized.
    pub fn cells(&self) -> Result<Vec<Cell>> {
        self.check_grid()?;
        let mut cells = Vec::new();
        for n in self.n.values() {
            for r in self.r.values() {
                let k = self.k.materialize(n, r)?;
                let max_iterations = self.max_iterations.materialize(n, r, k);
                if max_iterations == 0 {
                    return Err(HarnessError::Config("max_iterations must be at least 1".into()));
                }
                cells.push(Cell { n, r, k, max_iterations });
            }
        }
        Ok(cells)
    }

    /// Seed of replica `index`: `base_seed + index`.
    pub fn seed(&self, index: u64) -> u64 {
        self.base_seed.wrapping_add(index)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let c: ExperimentConfig =
            "kind = \"run\"\nn = 1\nr = 2\n[k]\nrule = \"explicit\"\nvalue = 2\n".parse().unwrap();
        assert_eq!(c.kind, Some(ExperimentKind::Run));
        assert_eq!(c.objective, ObjectiveKind::GOneMax);
        let cells = c.cells().unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!((cells[0].k, cells[0].max_iterations), (2, 10_000));
    }

    #[test]
    fn rejects_malformed_configs() {
        for bad in [
            "kind = ",
            "kind = \"jump\"",
            "objective = \"leading-ones\"",
            "n = [1]\nbogus = 3",
            "[verify]\nsignificance = 2.0",
        ] {
            let err = bad.parse::<ExperimentConfig>().unwrap_err();
            assert_eq!(err.exit_code(), 2, "{bad}");
        }
    }

    #[test]
    fn theorem_rule_materializes_multiples_of_r() {
        let rule = KRule::default();
        assert_eq!(rule.materialize(100, 8).unwrap(), 1840);
        assert_eq!(rule.materialize(256, 8).unwrap(), 4256);
        assert_eq!(rule.materialize(100, 16).unwrap(), 6528);
        for n in [2usize, 10, 64, 1000] {
            for r in [2usize, 3, 7, 8, 31] {
                let k = rule.materialize(n, r).unwrap();
                assert_eq!(k % r as u64, 0);
                assert!(k as f64 >= rule.raw(n, r));
            }
        }
    }

    #[test]
    fn explicit_rule_rounding() {
        let rounded = KRule::Explicit { value: 22, round_up: true };
        assert_eq!(rounded.materialize(3, 5).unwrap(), 25);
        let strict = KRule::Explicit { value: 22, round_up: false };
        assert_eq!(strict.materialize(3, 5).unwrap_err().exit_code(), 3);
        let ok = KRule::Explicit { value: 20, round_up: false };
        assert_eq!(ok.materialize(3, 5).unwrap(), 20);
    }

    #[test]
    fn iteration_rule() {
        let rule = IterationRule::default();
        let expected = (50.0 * rcga_on_gom_scale::<f64>(100, 8, 1840)).ceil() as u64;
        assert_eq!(rule.materialize(100, 8, 1840), expected);
        assert_eq!(rule.materialize(1, 2, 2), 10_000);
    }

    #[test]
    fn seeds_are_offsets() {
        let c: ExperimentConfig = "base_seed = 40".parse().unwrap();
        assert_eq!(c.seed(2), 42);
        assert!(c.cells().is_err());
    }
}
