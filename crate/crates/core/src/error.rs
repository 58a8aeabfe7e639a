use thiserror::Error;

use crate::rational::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {message}")]
    Schema { path: String, message: String },

    #[error("entitlements sum {} ≠ 1", crate::rational::format(.0))]
    EntitlementSum(Rational),

    #[error("{path}: good {good} does not exist in a {goods}-good instance")]
    DanglingGood { path: String, good: usize, goods: usize },

    #[error("{path}: negative weight {}", crate::rational::format(.weight))]
    NegativeWeight { path: String, weight: Rational },

    #[error("agent {0} does not exist")]
    UnknownAgent(usize),

    #[error("agent {agent}: {class} valuation is not supported by {operation}")]
    WrongClass { agent: usize, class: &'static str, operation: &'static str },

    #[error("marginal {} of good {good} is outside {{0,1}}", crate::rational::format(.marginal))]
    NonBinaryMarginal { good: usize, marginal: Rational },

    #[error("cannot trim a {len}-good non-wasteful set to {k} goods")]
    TrimOutOfRange { k: usize, len: usize },

    #[error(
        "{what} needs {needed} enumeration steps, above the oracle cap {cap} (set FAIRSHARE_ORACLE_CAP to raise it)"
    )]
    CapExceeded { what: &'static str, needed: String, cap: u64 },

    #[error("invalid WMMS partition for agent {agent}: {reason}")]
    InvalidPartition { agent: usize, reason: String },

    #[error("agent {agent} found no untouched candidate bundle at its first pick")]
    FirstPickUnavailable { agent: usize },

    #[error("invalid allocation: {0}")]
    InvalidAllocation(String),

    #[error("invalid generator parameters: {0}")]
    Generator(String),

    #[error("linear program: {0}")]
    Lp(#[from] crate::lp::LpError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
