use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] stiknn_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Format { path: PathBuf, line: u64, message: String },

    #[error("{0}")]
    Invalid(String),

    #[error("network error: {0}")]
    Network(String),

    #[error("OpenML: {0}")]
    OpenMl(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, line: u64, message: impl Into<String>) -> Self {
        Error::Format { path: path.into(), line, message: message.into() }
    }

    /// Process exit code: 2 for usage and precondition failures, 3 for I/O
    /// and network failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Network(_) | Error::OpenMl(_) => 3,
            Error::Core(_) | Error::Format { .. } | Error::Invalid(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
