use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature stopped at its evaluation cap.
    #[error("quadrature did not converge: achieved error {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    /// A series did not reach its tolerance within the term cap.
    #[error("series did not converge after {terms} terms (partial sum {partial}, remaining bound {remainder:e})")]
    NonConvergence {
        partial: f64,
        remainder: f64,
        terms: usize,
    },

    #[error("unsupported operation: {0}")]
    Capability(String),

    /// Monte Carlo would see too few hits for a meaningful interval.
    #[error("rare-event regime: about {expected_hits:.2} expected hits; use the Chernoff or exact-product estimators")]
    RareEvent { expected_hits: f64 },

    #[error("fit error: {0}")]
    Fit(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
