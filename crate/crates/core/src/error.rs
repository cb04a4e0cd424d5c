use thiserror::Error;

/// Failure modes shared by every checker in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Shapes do not line up: dimension mismatch, empty grids, degenerate samples.
    #[error("structural error: {0}")]
    Structural(String),
    /// An argument lies outside the domain an operation accepts.
    #[error("input-domain error: {0}")]
    InputDomain(String),
    /// A user-supplied evaluator or map broke a contract the checkers rely on.
    #[error("contract violation: {0}")]
    ContractViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn structural(msg: impl Into<String>) -> Error {
    Error::Structural(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::InputDomain(msg.into())
}

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::ContractViolation(msg.into())
}
