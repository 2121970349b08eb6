use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{} asserted check(s) failed:\n{}", .0.len(), .0.join("\n"))]
    Validation(Vec<String>),

    #[error(transparent)]
    Quadrature(af_relay::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("fixture {}: {reason}", path.display())]
    Fixture { path: PathBuf, reason: String },
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Quadrature(_) => 3,
            CliError::Io { .. } => 4,
            CliError::Fixture { .. } => 5,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<af_relay::Error> for CliError {
    fn from(e: af_relay::Error) -> Self {
        match e {
            af_relay::Error::NonConvergence { .. } => CliError::Quadrature(e),
            other => CliError::Usage(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
