use qslprobe_blackbox::BlackboxError;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, EstimatorError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimatorError {
    #[error("{points} point(s) at n_gate ≥ {threshold}; need at least {needed}")]
    InsufficientData { points: usize, threshold: u64, needed: usize },

    #[error("{gate}: slope {slope:e} s per repetition is significantly negative")]
    NegativeSlope { gate: String, slope: f64 },

    #[error("no physical (non-virtual) gate of arity {arity}")]
    NoPhysicalGate { arity: usize },

    #[error("invalid gate time {0} s")]
    InvalidDuration(f64),

    #[error("invalid plan: {0}")]
    InvalidPlan(String),

    #[error("replay backend has no recorded result for this job")]
    NotRecorded,

    #[error(transparent)]
    Backend(#[from] BlackboxError),

    #[error("experiment store: {0}")]
    Store(String),
}

impl From<csv::Error> for EstimatorError {
    fn from(e: csv::Error) -> Self {
        EstimatorError::Store(e.to_string())
    }
}

impl From<std::io::Error> for EstimatorError {
    fn from(e: std::io::Error) -> Self {
        EstimatorError::Store(e.to_string())
    }
}
