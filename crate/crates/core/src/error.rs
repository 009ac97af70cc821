use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (max |M - M^†| = {max_dev:e})")]
    NotHermitian { max_dev: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:e})")]
    NotPsd { min_eig: f64 },

    #[error("trace is {trace}, expected 1")]
    BadTrace { trace: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("joint dimension {required} exceeds the dimension cap {cap}")]
    DimCapExceeded { required: usize, cap: usize },

    #[error("invalid probability vector: {0}")]
    InvalidProbVector(String),

    #[error("effects do not sum to identity (max deviation {max_dev:e})")]
    IncompletePovm { max_dev: f64 },

    #[error("outcome probabilities drift from 1 by {drift:e}")]
    ProbabilityDrift { drift: f64 },

    #[error("empty state set")]
    EmptySet,

    #[error("state sets violate the promise: {0}")]
    PromiseViolated(String),

    #[error("handle {0} was already consumed by a measurement")]
    HandleConsumed(u64),

    #[error("handle {0} does not belong to this oracle")]
    ForeignHandle(u64),

    #[error("concept {concept} has a mixed output (input {input})")]
    NotPureClass { concept: usize, input: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),

    #[error("calibration failed: {0}")]
    CalibrationFailed(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("concept {concept}: {reason}")]
    InvariantViolation { concept: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
