use std::process::ExitCode;

use pseudoanalytic::error::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("numerical error: {0}")]
    Numerical(CoreError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<CoreError> for CliError {
    /// Bad configurations and mismatched contexts are the caller's fault;
    /// everything else is a numerical failure.
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Config(m) => CliError::Usage(m),
            CoreError::ContextMismatch(_) => CliError::Usage(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        })
    }
}

pub type CliResult<T> = Result<T, CliError>;
