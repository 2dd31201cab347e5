//! Experiment runner behind the `bridgelab` binary: configuration parsing,
//! the numeric output table, and one module per experiment. Everything is
//! deterministic — fixed seeds, fixed iteration orders, fixed formatting —
//! so a rerun of any command reproduces its output byte for byte.

pub mod config;
pub mod experiments;
pub mod record;

use bridgelab_core::CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(#[from] config::ConfigError),
    #[error("{0}")]
    Core(#[from] CoreError),
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
    #[error("record error: {0}")]
    Record(#[from] record::RecordError),
}

impl CliError {
    /// Process exit code: 2 for configuration problems, 3 when the bridge
    /// solver fails to converge, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(CoreError::NonConvergence { .. }) => 3,
            _ => 1,
        }
    }
}
