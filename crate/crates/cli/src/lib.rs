//! Experiment driver: JSON configuration in, CSV/JSON rows, a summary and plot data out.

use std::fmt::Display;
use std::path::Path;

pub mod config;
pub mod plot;
pub mod report;
pub mod run;

pub use config::{Config, Experiment, SCHEMA};
pub use run::{run, RunOutcome};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("computation failed: {0}")]
    Compute(String),
}

impl CliError {
    pub fn io(path: &Path, e: impl Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    /// 1 for every error; 2 is reserved for runs that complete with violations.
    pub fn exit_code(&self) -> i32 {
        1
    }
}
