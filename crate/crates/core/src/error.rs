use thiserror::Error;

/// Errors raised by construction, validation, and numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid encoder: {0}")]
    InvalidEncoder(String),
    #[error("invalid puncture pattern: {0}")]
    InvalidPattern(String),
    #[error("invalid constellation: {0}")]
    InvalidConstellation(String),
    #[error("supertrellis alignment failed: {0}")]
    Alignment(String),
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("missing record: {0}")]
    MissingRecord(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
