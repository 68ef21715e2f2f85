//! Front end of the `synthlab` binary: configuration, figure presets and the
//! `phase`, `noise` and `geometry` commands.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod config;
pub mod output;
pub mod presets;

use std::process::ExitCode;

/// Failure classes, one per exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("solver failures: {0}")]
    SolverFailures(String),

    #[error(transparent)]
    Core(#[from] synthlab_core::Error),

    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::SolverFailures(_) => 3,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Solver-failure rate above which a run exits with status 3.
pub const MAX_FAILURE_RATE: f64 = 0.05;

pub fn exit_status(result: Result<(), CliError>) -> ExitCode {
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("synthlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
