//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input data (bad files, invalid networks,
    /// mismatched node sets). Maps to CLI exit code 2.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A parameter outside its legal domain (epsilon, rho, fractions,
    /// infeasible degree laws). Maps to CLI exit code 4.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Power iteration did not converge within the iteration budget.
    #[error("power iteration failed to converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    /// The Katz resolvent series diverged (alpha at or beyond 1/zeta).
    #[error("resolvent divergence: alpha {alpha} is not below 1/zeta for zeta {zeta}")]
    ResolventDivergence { alpha: f64, zeta: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid_input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
