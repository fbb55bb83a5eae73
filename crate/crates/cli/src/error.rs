use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] probe_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invariant failure: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 invariant failure, 2 invalid config, 3 I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invariant(_) => 1,
            CliError::Config(_) | CliError::Core(_) => 2,
            CliError::Io { .. } | CliError::Parse { .. } => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
