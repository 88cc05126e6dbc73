use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the solver stack.
#[derive(Debug, Error)]
pub enum Error {
    /// Non-finite values, blow-up, or a failed numerical precondition.
    #[error("numeric error: {context}{}", step.map(|s| format!(" (step {s})")).unwrap_or_default())]
    Numeric { context: String, step: Option<usize> },

    /// Invalid parameters, unknown names, mismatched grids, malformed config.
    #[error("configuration error: {0}")]
    Configuration(String),

    /// An operation was called outside its contract.
    #[error("usage error: {0}")]
    Usage(String),

    /// A closed-form quantity is undefined at the requested arguments.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn numeric(context: impl Into<String>) -> Self {
        Error::Numeric {
            context: context.into(),
            step: None,
        }
    }

    pub fn numeric_at(context: impl Into<String>, step: usize) -> Self {
        Error::Numeric {
            context: context.into(),
            step: Some(step),
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Configuration(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
