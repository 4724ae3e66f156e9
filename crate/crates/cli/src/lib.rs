//! Experiment configuration and runners behind the `pqc` binary.

mod config;
mod experiments;

pub use config::{Experiment, ExperimentConfig, InlineTarget, PolyTerm, TargetSpec, TrigTerm};
pub use experiments::{build, run_experiment, synthesize, write_report, Built, Reference};

use pqc_core::PqcError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] PqcError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Core(_) => "library",
            CliError::Io(_) => "io",
        }
    }

    /// `{"error": {"kind": ..., "message": ...}}`.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": { "kind": self.kind(), "message": self.to_string() } }).to_string()
    }
}
