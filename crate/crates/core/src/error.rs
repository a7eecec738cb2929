use thiserror::Error;

/// Errors raised by the pricing engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {}", .0.join("; "))]
    InvalidParams(Vec<String>),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("singular frequency: gamma vanishes at p = {re}{im:+}i")]
    SingularFrequency { re: f64, im: f64 },

    #[error("pole in g: b - i*rho*sigma*p - gamma vanishes at p = {0}")]
    PoleInG(f64),

    #[error("quadrature failure: error estimate {estimate:.3e} exceeds tolerance {tolerance:.3e}")]
    QuadratureFailure { estimate: f64, tolerance: f64 },

    #[error("damping-infeasible precondition: {0}")]
    DampingInfeasible(String),

    #[error("invalid shift configuration: {0}")]
    InvalidShift(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
