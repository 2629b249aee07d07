//! Closed-form evaluators for the runtime-analysis bounds and Monte Carlo
//! verifiers that test them.
//!
//! Evaluators reproduce each formula with its explicit constants and are
//! generic over [`num_traits::Float`]. Verifiers return a [`BoundReport`]
//! whose status is decided by a one-sided test at a fixed significance, so a
//! report never claims a violation that sampling noise could explain.

mod bounds;
mod convolution;
mod stats;
pub mod verify;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use bounds::{
    adak_witt_bound, adak_witt_k, biased_window_bound, chernoff_variant_bound, drift_prediction, martingale_beta,
    martingale_bound, mult_drift_tail, mult_drift_time, rcga_on_gom_scale, simulate_reinforced_bernoulli, theorem_k,
    variance_bound, DriftPrediction,
};
pub use convolution::{conv_lhs, conv_rhs};
pub use stats::{binomial_lower_tail, binomial_upper_tail, normal_upper_quantile};

/// Significance used by every verifier unless configured otherwise.
pub const DEFAULT_SIGNIFICANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundStatus {
    Satisfied,
    /// The bound is a probability bound `>= 1` and says nothing.
    SatisfiedVacuously,
    /// Significant violation at the configured level.
    Violated,
}

impl BoundStatus {
    pub fn name(self) -> &'static str {
        match self {
            Self::Satisfied => "satisfied",
            Self::SatisfiedVacuously => "satisfied-vacuously",
            Self::Violated => "violated",
        }
    }

    pub fn is_ok(self) -> bool {
        self != Self::Violated
    }
}

impl fmt::Display for BoundStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub oracle: String,
    pub parameters: BTreeMap<String, f64>,
    pub bound: f64,
    pub empirical: Option<f64>,
    pub samples: u64,
    pub status: BoundStatus,
}

impl BoundReport {
    pub fn new(oracle: &str, bound: f64) -> Self {
        Self {
            oracle: oracle.to_string(),
            parameters: BTreeMap::new(),
            bound,
            empirical: None,
            samples: 0,
            status: BoundStatus::Satisfied,
        }
    }

    pub fn param(mut self, name: &str, value: f64) -> Self {
        self.parameters.insert(name.to_string(), value);
        self
    }

    pub fn satisfied(&self) -> bool {
        self.status.is_ok()
    }
}
