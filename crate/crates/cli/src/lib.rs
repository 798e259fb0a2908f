//! Command implementations for the `dqdrng` binary.

pub mod args;
pub mod commands;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] dqdrng::Error),
    #[error("timing check failed: {0}")]
    Timing(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Domain(dqdrng::Error::Config(_)) => 1,
            CliError::Domain(_) | CliError::Io(_) => 2,
            CliError::Timing(_) => 3,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
