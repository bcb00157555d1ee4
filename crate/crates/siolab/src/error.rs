//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by siolab computations.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A quadrature or extrapolation failed to converge within its budget.
    #[error("did not converge: {0}")]
    NonConvergent(String),

    /// A configuration file or spec failed validation.
    #[error("invalid config: {0}")]
    Config(String),

    /// Two inputs that must match (dimension, mesh identity) do not.
    #[error("incompatible inputs: {0}")]
    Incompatible(String),

    /// A sampling budget was exhausted before the check completed.
    #[error("sampling budget exceeded: {0}")]
    Budget(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
