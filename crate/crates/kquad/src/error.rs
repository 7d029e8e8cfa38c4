use thiserror::Error;

/// Errors produced by the kquad library.
#[derive(Debug, Error)]
pub enum Error {
    /// Input values violate a precondition (empty sets, nonpositive
    /// parameters, out-of-range indices, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A point, vector or matrix has the wrong dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Two paired containers disagree in length.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// Two points coincide up to the distinctness tolerance.
    #[error("points {i} and {j} coincide (squared distance <= 1e-24)")]
    DuplicatePoints { i: usize, j: usize },

    /// A candidate index was passed to `add_point` twice.
    #[error("candidate {index} is already selected")]
    AlreadySelected { index: usize },

    /// The power function at the requested candidate is below the
    /// breakdown threshold; the Newton update would divide by ~0.
    #[error("power function breakdown at candidate {index} (power^2 = {power_sq:.3e})")]
    PowerBreakdown { index: usize, power_sq: f64 },

    /// A dense Gram system could not be factorized.
    #[error("gram matrix is numerically singular")]
    SingularGram,

    /// A data file could not be parsed.
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
