use thiserror::Error;

use crate::algebra::Domain;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("scalar domain mismatch: {0} vs {1}")]
    DomainMismatch(Domain, Domain),

    #[error("not invertible: {0}")]
    NotInvertible(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("prime {p} exceeds the configured cap {cap}")]
    PrimeAboveCap { p: u32, cap: u32 },

    #[error("closure requires finite domain")]
    ClosureRequiresFiniteDomain,

    #[error("requires finite group")]
    RequiresFiniteGroup,

    #[error("work cap exceeded: job needs about {required} evaluations, cap is {cap}")]
    CapExceeded { required: u64, cap: u64 },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("secret {0} is outside the instance's secret domain")]
    NotInSecretDomain(String),

    #[error("the zero vector cannot be used as an encoding")]
    ZeroVector,

    #[error("protocol misuse: {0}")]
    Protocol(String),

    #[error("inconsistent transcript: no (s, t, A, B) reproduces it")]
    InconsistentTranscript,

    #[error("transcript does not match instance: {0}")]
    TranscriptMismatch(String),

    #[error("attack inapplicable: {0}")]
    AttackInapplicable(String),

    #[error("invalid prior: {0}")]
    InvalidPrior(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
