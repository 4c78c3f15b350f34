use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad argument values (non-positive extent, zero-length input, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Weight evaluation left the representable range or was fed x < 0.
    #[error("weight range error: {0}")]
    WeightRange(String),

    /// Two objects built on different grids (or weights) were combined.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Shift length is not a positive integer multiple of the grid spacing.
    #[error("shift {t} is not a positive multiple of grid spacing {h}")]
    ShiftNotOnGrid { t: f64, h: f64 },

    /// Dense assembly guard: matrices above this order need an explicit override.
    #[error("dense matrix of order {n} exceeds guard {limit}; pass the override to proceed")]
    MatrixGuard { n: usize, limit: usize },

    /// Iterative solver ran out of iterations.
    #[error("{what} did not converge after {iterations} iterations (last value {last:.6e})")]
    NonConvergence {
        what: String,
        iterations: usize,
        last: f64,
    },

    /// Structured-file ingestion failure, pointing at the first offending row.
    #[error("csv error at row {row}: {message}")]
    Csv { row: usize, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
