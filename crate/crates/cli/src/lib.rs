//! Configuration, sweep execution and CSV output behind the `dfrelay` binary.

pub mod config;
pub mod sweep;

use thiserror::Error;

pub use config::{parse_config, GridPoint, LinkKind, Mode, SnrGrid, SweepConfig};
pub use sweep::{emit_csv, run_sweep, write_csv, SweepResult, SweepRow, CSV_HEADER};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(dfrelay::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(String),
}

impl CliError {
    /// Process exit status: 1 for input and domain problems, 2 for numeric
    /// failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(dfrelay::Error::Numeric { .. }) => 2,
            _ => 1,
        }
    }
}
