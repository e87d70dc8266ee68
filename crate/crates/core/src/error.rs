use thiserror::Error;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge: {subdivisions} subdivisions, error estimate {abs_error:e} for value {value:e}")]
    NonConvergence {
        value: f64,
        abs_error: f64,
        subdivisions: usize,
    },

    #[error("integrand returned a non-finite value at x = {at}")]
    NonFiniteIntegrand { at: f64 },

    #[error("branch cut reached: {0}")]
    Branch(String),

    #[error("outside the validated regime: {0}")]
    Regime(String),

    #[error("precision loss: {0}")]
    PrecisionLoss(String),

    #[error("fit needs at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("fit data changes sign")]
    MixedSign,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
