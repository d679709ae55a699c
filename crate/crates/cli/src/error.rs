use std::fmt::Display;

use thiserror::Error;

/// Every way a command can fail, grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config keys or parameter values.
    #[error("{0}")]
    Usage(String),
    /// Unreadable or malformed input, or a run that could not complete on it.
    #[error("{0}")]
    Data(String),
    /// The run finished but its `--assert` check did not hold.
    #[error("assertion failed: {0}")]
    Assert(String),
}

impl CliError {
    pub fn usage(e: impl Display) -> Self {
        CliError::Usage(e.to_string())
    }

    pub fn data(e: impl Display) -> Self {
        CliError::Data(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Assert(_) => 3,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
