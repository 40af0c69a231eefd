use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Inputs violate a precondition (shape mismatch, wrong space role, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// A numerical routine failed to converge or hit a singular system.
    #[error("solver failure at iteration {iteration}: {message} (residual {residual:e})")]
    SolverFailure {
        iteration: usize,
        residual: f64,
        message: String,
    },
    /// Bad request from a caller, e.g. an unknown suite name.
    #[error("usage error: {0}")]
    Usage(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn solver(iteration: usize, residual: f64, msg: impl Into<String>) -> Self {
        Error::SolverFailure {
            iteration,
            residual,
            message: msg.into(),
        }
    }

    pub fn is_solver_failure(&self) -> bool {
        matches!(self, Error::SolverFailure { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
