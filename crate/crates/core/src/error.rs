use thiserror::Error;

/// Errors raised by the exact-arithmetic layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("structural mismatch: {0}")]
    Structural(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unknown place {0}")]
    UnknownPlace(String),
    #[error("condition on T fails: {0}")]
    DrCond(String),
    #[error("not integral: {0}")]
    NotIntegral(String),
    #[error("zero divisor: {0}")]
    ZeroDivisor(String),
    #[error("parity mismatch: {0}")]
    Parity(String),
    #[error("out of range: {0}")]
    Range(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn structural(msg: impl Into<String>) -> Error {
    Error::Structural(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
