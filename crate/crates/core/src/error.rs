use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("not a probability vector: {0}")]
    NotSimplex(String),
    #[error("undefined for a single category (log 1 = 0)")]
    SingleCategory,
    #[error("no selections recorded")]
    NoSelections,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid value: {0}")]
    InvalidValue(String),
    #[error("unknown environment `{0}`")]
    UnknownEnvironment(String),
    #[error("non-finite score {0}")]
    NonFiniteScore(f64),
    #[error("zero pooled variance with unequal means (effect size is infinite)")]
    InfiniteEffect,
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    #[error("invalid config at `{field}`: {reason}")]
    Config { field: String, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
