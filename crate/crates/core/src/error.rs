use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite entry encountered in input")]
    NonFinite,

    #[error("ill-posed input: {0}")]
    IllPosed(String),

    #[error("QR iteration failed to converge for eigenvalue index {index} after {iterations} iterations")]
    EigenNonConvergence { index: usize, iterations: usize },

    #[error("point is not a zero of the system: residual {residual:e} exceeds {tolerance:e}")]
    NotAZero { residual: f64, tolerance: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
