use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("insufficient bits: need at least {needed}, got {got}")]
    InsufficientBits { needed: usize, got: usize },

    #[error("invalid length {0}: must be at least 1")]
    InvalidLength(usize),

    #[error("invalid detect length {0}: must be at least 1")]
    InvalidDetectLength(usize),

    #[error("invalid detector model: {0}")]
    InvalidModel(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {location}: {message}")]
    Format {
        path: PathBuf,
        location: String,
        message: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn at_line(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            location: format!("line {line}"),
            message: message.into(),
        }
    }

    pub(crate) fn at_byte(path: impl Into<PathBuf>, offset: usize, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            location: format!("byte {offset}"),
            message: message.into(),
        }
    }
}
