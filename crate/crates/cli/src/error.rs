use std::path::PathBuf;

use thiserror::Error;

use crate::config::ConfigError;

/// Process exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const NO_EQUILIBRIUM: i32 = 3;
    pub const IO: i32 = 4;
    pub const MALFORMED_INPUT: i32 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("{0}")]
    NoEquilibrium(omega_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {message}", path.display())]
    Malformed { path: PathBuf, message: String },

    #[error(transparent)]
    Core(omega_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => exit::USAGE,
            CliError::NoEquilibrium(_) => exit::NO_EQUILIBRIUM,
            CliError::Io { .. } => exit::IO,
            CliError::Malformed { .. } => exit::MALFORMED_INPUT,
            CliError::Core(e) => match e {
                omega_core::Error::Io(_) => exit::IO,
                omega_core::Error::MalformedCsv { .. } => exit::MALFORMED_INPUT,
                _ => exit::USAGE,
            },
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<omega_core::Error> for CliError {
    fn from(e: omega_core::Error) -> Self {
        match e {
            omega_core::Error::NoEquilibrium { .. } => CliError::NoEquilibrium(e),
            other => CliError::Core(other),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
