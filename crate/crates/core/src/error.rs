//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("empty dataset: {0}")]
    EmptyData(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("more than two distinct labels in input: {0:?}")]
    TooManyLabels(Vec<String>),

    #[error("SMO did not converge within the kernel-evaluation cap (duality gap {gap:.3e})")]
    NonConvergence { gap: f64 },

    #[error("no eligible ball centers under the interiority margin")]
    NoEligibleCenters,

    #[error("combinatorial budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("removal budget {z} is not smaller than the class size {class_size}")]
    BudgetTooLarge { z: usize, class_size: usize },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
