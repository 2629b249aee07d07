use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alphabet size r = {0} is too small (need r >= {1})")]
    AlphabetTooSmall(usize, usize),
    #[error("dimension n must be at least 1")]
    EmptyDimension,
    #[error("K = {k} is not well-behaved for r = {r} (K mod r = {})", k % r)]
    IllBehavedK { k: u64, r: u64 },
    #[error("value {value} at position {position} lies outside [0..{max}]")]
    ValueOutOfRange { position: usize, value: usize, max: usize },
    #[error("index {index} out of range for {what} of size {size}")]
    IndexOutOfRange { what: &'static str, index: usize, size: usize },
    #[error("vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("frequency matrix corrupted: {0}")]
    Corrupted(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("trace does not carry {0}")]
    MissingTrace(&'static str),
}
