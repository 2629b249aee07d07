use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(rcga_core::Error),
}

impl HarnessError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Precondition(_) | Self::Core(_) => 3,
            Self::Io { .. } | Self::Csv(_) => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> Self {
        let path = path.into();
        move |source| Self::Io { path, source }
    }
}

impl From<rcga_core::Error> for HarnessError {
    fn from(e: rcga_core::Error) -> Self {
        match e {
            rcga_core::Error::Precondition(msg) => Self::Precondition(msg),
            other => Self::Core(other),
        }
    }
}

/// Exit status when every declared acceptance check passed.
pub const EXIT_SUCCESS: i32 = 0;
/// Exit status when the campaign ran but an acceptance check failed.
pub const EXIT_ACCEPTANCE: i32 = 4;
