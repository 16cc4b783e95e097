use thiserror::Error;

/// Errors raised by construction and evaluation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("probability {0} outside (0,1)")]
    ProbabilityOutOfRange(f64),
    #[error("distribution not in P_(0,1)")]
    NotInP01,
    #[error("weight not strictly positive")]
    WeightNotStrictlyPositive,
    #[error("distribution has no density")]
    MissingDensity,
    #[error("non-finite integrand value at x = {x}")]
    NonFiniteIntegrand { x: f64 },
    #[error("rule `{rule}` is not applicable: {reason}")]
    RuleNotApplicable { rule: String, reason: String },
    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
