use thiserror::Error;

/// Errors produced by the distance kernels, hash schemes and index.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    /// No traversal satisfies the alignment constraint.
    #[error("no valid traversal: {0}")]
    Infeasible(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("traversal enumeration limited to 8x8 curves, got {m1}x{m2}")]
    EnumerationTooLarge { m1: usize, m2: usize },

    #[error("index would need {tables} hash tables per repetition (limit {limit})")]
    TooManyTables { tables: u64, limit: u64 },

    /// Rejection sampling gave up.
    #[error("unsatisfiable workload: {0}")]
    Unsatisfiable(String),

    #[error("malformed index file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
