use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PqcError {
    #[error("input outside the admissible domain: {0}")]
    Domain(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parity mismatch: {0}")]
    ParityMismatch(String),
    #[error("{what} did not converge; best residual {best_residual:.3e}")]
    NotConverged { what: String, best_residual: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("circuit width {width} exceeds the simulator limit of {limit} qubits")]
    WidthLimit { width: usize, limit: usize },
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("verification failed for {what}: {detail}")]
    Verification { what: String, detail: String },
    #[error("coefficient {value} exceeds the unit normalization bound")]
    CoefficientBound { value: f64 },
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, PqcError>;
