//! Error type shared across the crate.

use crate::portfolio::AlgorithmId;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown problem class {0}; valid class ids are 1..=24")]
    UnknownClass(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("budget {budget} is below the population size {popsize} of {algorithm}")]
    BudgetTooSmall {
        algorithm: AlgorithmId,
        budget: usize,
        popsize: usize,
    },

    #[error("run table incomplete: {0}")]
    IncompleteTable(String),

    #[error("record does not belong to instance: {0}")]
    RecordMismatch(String),

    #[error("integrity violation: {0}")]
    Integrity(String),

    #[error("feature key mismatch: {0}")]
    KeyMismatch(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate split fraction {0}")]
    DegenerateFraction(f64),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed artifact {path}: {detail}")]
    Malformed { path: String, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
