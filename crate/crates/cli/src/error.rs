use std::io;
use std::path::PathBuf;

use apo_core::imaging::ImageError;
use thiserror::Error;

/// Everything a subcommand can fail with, each mapped to a fixed exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flag values, invalid configurations, conflicting report inputs.
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}: {source}", path.display())]
    Image {
        path: PathBuf,
        #[source]
        source: ImageError,
    },
    /// A failed self-check or an optimizer run that could not complete.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Image { .. } => 4,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<apo_core::EngineError> for CliError {
    fn from(e: apo_core::EngineError) -> Self {
        use apo_core::EngineError as E;
        match e {
            E::Config(_) | E::Objective(_) | E::NoRuns => CliError::Usage(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}
