//! Crate-wide error type.

use std::io;

/// Errors produced by any perfscout operation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Reading or writing a file failed.
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },

    /// A dataset or other input failed validation.
    #[error("invalid data: {0}")]
    InvalidData(String),

    /// A parameter was outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two vectors that must share a length did not.
    #[error("arity mismatch: expected {expected}, got {actual}")]
    ArityMismatch { expected: usize, actual: usize },

    /// The pole line collapsed to a point (west == east), so nothing can
    /// be projected onto it.
    #[error("degenerate pole line: west and east coincide (c = 0)")]
    DegenerateLine,

    /// Rejection sampling could not find a valid configuration.
    #[error("no valid configuration found within {attempts} attempts")]
    NoValidConfiguration { attempts: usize },

    /// The data admits no meaningful answer (e.g. every slope of the
    /// correlation curve was discarded).
    #[error("degenerate data: {0}")]
    Degenerate(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
