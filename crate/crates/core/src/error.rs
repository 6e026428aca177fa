use thiserror::Error;

/// A violated invariant of [`ModelParams`](crate::ModelParams).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("impatience violated: rho ({rho}) must exceed r ({r})")]
    ImpatienceViolated { rho: f64, r: f64 },
    #[error("negative interest rate: r = {0}")]
    NegativeRate(f64),
    #[error("risk aversion must be positive: gamma = {0}")]
    NonPositiveGamma(f64),
    #[error("income must be positive: y = {0}")]
    NonPositiveIncome(f64),
    #[error("parameter {name} is not finite ({value})")]
    NonFinite { name: &'static str, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("{what}: argument {value} outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("{what} requires r = 0 (got r = {r})")]
    RequiresZeroRate { what: &'static str, r: f64 },
    #[error("{what} requires r > 0")]
    RequiresPositiveRate { what: &'static str },
    #[error("{what} did not converge after {iterations} iterations")]
    Convergence {
        what: &'static str,
        iterations: usize,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(what: &'static str, value: f64, domain: &'static str) -> Error {
    Error::Domain {
        what,
        value,
        domain,
    }
}
