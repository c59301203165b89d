use thiserror::Error;

use crate::dynamics::Trajectory;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A user-supplied configuration violates a documented invariant.
    #[error("config error: {0}")]
    Config(String),

    /// The adaptive integrator gave up. Carries whatever was computed up to
    /// the failure point.
    #[error("integration failed at t = {t}: {reason}")]
    Integration {
        t: f64,
        reason: String,
        partial: Option<Box<Trajectory>>,
    },

    /// The integration finished but a state invariant (normalisation,
    /// positivity, hermiticity) was broken beyond tolerance.
    #[error("integrity error: {0}")]
    Integrity(String),

    /// F = Q tau / (1 - 2 eps)^2 is undefined at eps = 1/2.
    #[error("reset factor undefined: error probability is 1/2 (no reset progress)")]
    UndefinedResetFactor,

    /// Observables are mutually inconsistent (e.g. zero entropy production
    /// with non-zero displacement).
    #[error("inconsistent observables: {0}")]
    Inconsistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
