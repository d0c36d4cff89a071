use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionError { expected: usize, got: usize },

    #[error("state is not normalized (|norm^2 - 1| = {0:e})")]
    NotNormalized(f64),

    /// An eigenphase sits within the ambiguity window just below the 2π cut,
    /// so the nonnegative branch cannot be chosen reliably.
    #[error("eigenphase {phase} rad lies within the branch-cut ambiguity window")]
    BranchAmbiguity { phase: f64 },

    #[error("energy must be positive and finite, got {0}")]
    InvalidEnergy(f64),

    #[error("duration must be positive and finite, got {0}")]
    InvalidDuration(f64),

    #[error("fidelity error must lie in [0, 1), got {0}")]
    InvalidFidelity(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
