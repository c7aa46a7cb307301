use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the clustering library and CLI.
#[derive(Debug, Error)]
pub enum Error {
    /// Input data violates a structural requirement (shape, finiteness, length).
    #[error("validation error: {0}")]
    Validation(String),

    /// A user-facing parameter is out of its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// An internal precondition of an operation was not met by the caller.
    #[error("contract violation: {0}")]
    Contract(String),

    /// The requested metric is not defined for this input.
    #[error("metric undefined: {0}")]
    MetricUndefined(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad flags or malformed input rather than the runtime environment.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Validation(_) | Error::Parameter { .. } | Error::Parse { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
