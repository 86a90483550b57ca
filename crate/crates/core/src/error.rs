use thiserror::Error;

pub type Result<T> = std::result::Result<T, CoverError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoverError {
    #[error("cannot build a unit vector from a zero or non-finite vector")]
    ZeroVector,

    #[error("plank width must be positive and finite, got {0}")]
    InvalidWidth(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("region is empty")]
    EmptyRegion,

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
}
