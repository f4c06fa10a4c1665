//! Error classification behind the exit-code contract: 0 success,
//! 1 validation, 2 runtime.
//!
//! Validation means the command never got to real work: unparseable flags,
//! bad config, missing or invalid input files, artifacts of the wrong kind.
//! Runtime means a stage failed after its inputs checked out. Classification
//! happens at the call site, which knows which phase it is in.

use thiserror::Error;

pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn validation(message: impl std::fmt::Display) -> Self {
        CliError::Validation(message.to_string())
    }

    pub fn runtime(message: impl std::fmt::Display) -> Self {
        CliError::Runtime(message.to_string())
    }

    /// Runtime failure wrapped with the pipeline stage that hit it.
    pub fn stage(stage: &str, error: impl std::fmt::Display) -> Self {
        CliError::Runtime(format!("stage {stage}: {error}"))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}
