use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("shape mismatch: expected {expected}, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("no convergence after {iterations} iterations: {what}")]
    Convergence { what: &'static str, iterations: usize },

    #[error("unknown problem: {0}")]
    UnknownProblem(String),

    #[error("degenerate normalization: {0}")]
    DegenerateNormalization(String),

    #[error("degenerate base hypervolume: {0}")]
    DegenerateBase(f64),

    #[error("config error: {0}")]
    Config(String),

    #[error("report error: {0}")]
    Report(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by the user's experiment definition rather than
    /// by a failure while running it.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::UnknownProblem(_) | Error::Parameter(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
