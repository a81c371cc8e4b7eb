use thiserror::Error;

/// Errors raised by constructors and solvers in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MfgError {
    #[error("state {state} out of range for dimension {dim} (states are numbered from 1)")]
    StateOutOfRange { state: usize, dim: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("non-finite entry {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("not a probability vector: {reason}")]
    NotOnSimplex { reason: String },

    #[error("time grid needs at least 2 intervals, got {0}")]
    GridTooSmall(usize),

    #[error("time horizon must be positive and finite, got {0}")]
    InvalidHorizon(f64),

    #[error("trajectories live on different grids")]
    GridMismatch,

    #[error("trajectories do not share initial-terminal data")]
    BoundaryMismatch,

    #[error("model has no potential structure")]
    NoPotential,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("expected {expected} right-hand side entries, got {got}")]
    RhsLength { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, MfgError>;
