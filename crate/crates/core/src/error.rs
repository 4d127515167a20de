//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by any module in this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Objective or decision vectors of incompatible lengths.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An operation received an empty collection it cannot handle.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// A parameter violated its documented range or size constraint.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A genotype fell outside its task's search space.
    #[error("domain error: {0}")]
    Domain(String),

    /// Inconsistent or unsupported configuration.
    #[error("config error: {0}")]
    Config(String),

    /// Numerical failure (NaN loss, factorization breakdown, ...).
    #[error("numeric error: {0}")]
    Numeric(String),

    /// The requested capability does not exist for this task.
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
