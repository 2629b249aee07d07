//! The r-valued compact genetic algorithm (r-cGA) over exact integer frequency
//! counts, together with per-iteration instrumentation of biased and
//! random-walk steps, the interval hierarchy used to split a run into phases,
//! and evaluators/Monte Carlo verifiers for the runtime-analysis bounds.
//!
//! Frequencies never touch floating point: a row of the frequency matrix is a
//! vector of counts summing to `K`. Probability masses come back as exact
//! rationals ([`Exact`]) and can be converted into any [`Scalar`].
//!
//! The bound evaluators in [`oracles`] are generic over
//! [`num_traits::Float`]; [`Real`] is the default instantiation.

pub mod algorithm;
pub mod error;
pub mod fitness;
pub mod hierarchy;
pub mod instrumentation;
pub mod matrix;
pub mod oracles;
pub mod scalar;

pub use algorithm::{
    compete, run, sample_individual, update, Competition, Individual, Rcga, RunConfig, RunResult, Step, Trace,
    TraceLevel,
};
pub use error::{Error, Result};
pub use fitness::{Objective, ObjectiveKind};
pub use hierarchy::{HierarchyTable, PhaseState};
pub use instrumentation::{DecomposedSeries, StepClass, StepRecord};
pub use matrix::FrequencyMatrix;
pub use scalar::Scalar;

use rand::SeedableRng;

/// Default floating-point scalar for bound evaluation and statistics.
pub type Real = f64;

/// Exact probability masses: numerator and denominator are counts, the
/// denominator always divides `K`.
pub type Exact = num_rational::Ratio<i64>;

/// Arbitrary-precision rational, used where sums of products of masses can
/// outgrow `i64` (e.g. exact recomputation of convolution sums).
pub type BigExact = num_rational::BigRational;

/// The random source driving every run. Pinned so that traces are portable.
pub type Rng = rand_chacha::ChaCha8Rng;

/// Identifier of [`Rng`] and the sampling procedure layered on top of it,
/// stored in every [`RunResult`].
pub const RNG_ALGORITHM: &str = "chacha8(rand_chacha 0.3)+uniform-u32(rand 0.8)";

/// Builds the run RNG from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}
