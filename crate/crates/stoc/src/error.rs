//! Error type shared across the crate.

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum StocError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid argument `{field}`: {message}")]
    InvalidArgument { field: String, message: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("non-finite value in {context}")]
    NonFinite { context: String },

    #[error("covariance factorization failed at shrinkage {shrinkage}")]
    Factorization { shrinkage: f64 },

    #[error("not enough rows to fit: have {rows}, need {needed}")]
    TooFewRows { rows: usize, needed: usize },

    #[error("insufficient anomalies: need {needed}, table has {available}")]
    InsufficientAnomalies { needed: usize, available: usize },

    #[error("training diverged: non-finite loss at step {step}")]
    Diverged { step: usize },

    #[error("refined set collapsed: {kept} rows kept, need at least {needed}")]
    RefinedSetCollapse { kept: usize, needed: usize },

    #[error("model not finalized: {0}")]
    NotFinalized(String),

    #[error("labels contain a single class; metric undefined")]
    SingleClassLabels,

    #[error("checkpoint error: {0}")]
    Checkpoint(String),
}

impl StocError {
    pub fn invalid(field: &str, message: impl Into<String>) -> Self {
        StocError::InvalidArgument {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, StocError>;
