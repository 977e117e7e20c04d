use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChaosError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("order k={k} exceeds the limit {limit}")]
    OrderTooLarge { k: usize, limit: usize },
    #[error("quadrature did not converge: estimate {estimate:e} above tolerance {tolerance:e}")]
    NonConvergence { estimate: f64, tolerance: f64 },
    #[error("lattice budget exceeded: {0}")]
    Budget(String),
    #[error("symmetry violation: {0}")]
    Symmetry(String),
    #[error("empty input: {0}")]
    Empty(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, ChaosError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(ChaosError::Domain(msg.into()))
}
