//! Library side of the `tasnif` command-line tool: experiment configuration,
//! the five-stage experiment runner, and report-table emission.

pub mod config;
pub mod files;
pub mod report;
pub mod stages;

use thiserror::Error;

/// CLI-level error split: validation problems exit with code 1, runtime and
/// data problems with code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error(transparent)]
    Runtime(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl From<tasnif::Error> for CliError {
    fn from(e: tasnif::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

pub type CliResult<T> = Result<T, CliError>;
