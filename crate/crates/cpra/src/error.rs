use thiserror::Error;

/// Errors produced by instance handling, solvers, and reporting.
#[derive(Debug, Error)]
pub enum CpraError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("graph generation failed: {0}")]
    GenerationFailure(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("unsupported mode: {0}")]
    UnsupportedMode(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CpraError>;
