use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// A verification check failed or the input is degenerate.
    pub const FAILURE: i32 = 1;
    /// Unknown command or malformed arguments.
    pub const USAGE: i32 = 2;
    pub const IO: i32 = 3;
    pub const MISSING_FAMILY: i32 = 4;
    /// A value out of range or unparsable input data.
    pub const INVALID_VALUE: i32 = 5;
    pub const UNKNOWN_CONFIG_KEY: i32 = 6;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{context} {}: {source}", path.display())]
    Io {
        context: &'static str,
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("no vector family given: {0}")]
    MissingFamily(String),
    #[error("invalid value: {0}")]
    InvalidValue(String),
    #[error("unknown key {key:?} in config file {} (line {line})", path.display())]
    UnknownConfigKey { key: String, path: PathBuf, line: usize },
    #[error(transparent)]
    Ingest(#[from] crate::ingest::IngestError),
    #[error(transparent)]
    Core(#[from] gramheight::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use gramheight::Error as E;
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Verification(_) => exit::FAILURE,
            CliError::Io { .. } | CliError::Ingest(crate::ingest::IngestError::Read { .. }) => exit::IO,
            CliError::MissingFamily(_) => exit::MISSING_FAMILY,
            CliError::InvalidValue(_) | CliError::Ingest(_) => exit::INVALID_VALUE,
            CliError::UnknownConfigKey { .. } => exit::UNKNOWN_CONFIG_KEY,
            CliError::Core(E::Degenerate(_) | E::Singular { .. } | E::NotPositiveDefinite { .. }) => {
                exit::FAILURE
            }
            CliError::Core(_) => exit::INVALID_VALUE,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
