use thiserror::Error;

/// Errors produced by the library.
///
/// Extended-real results (a rate that is `+inf`) are values, not errors.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid initial profile: {0}")]
    InvalidProfile(String),

    #[error("cannot realize initial configuration: {0}")]
    EmptyConfiguration(String),

    #[error("malformed path: {0}")]
    MalformedPath(String),

    #[error("inadmissible increment: {constraint} violated by {magnitude:.3e}")]
    Inadmissible { constraint: String, magnitude: f64 },

    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),

    #[error("total selection weight is zero at step {step}")]
    ZeroWeight { step: usize },

    #[error("quadrature did not converge: estimated error {error:.3e} on [{a}, {b}]")]
    Quadrature { error: f64, a: f64, b: f64 },

    #[error("ODE integration failed at t = {t}: {reason}")]
    Ode { t: f64, reason: String },

    #[error("exact enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("root bracketing failed: {0}")]
    Bracket(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
