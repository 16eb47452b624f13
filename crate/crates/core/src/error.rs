use thiserror::Error;

use crate::scalar::Domain;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("scalar domain mismatch: {left} vs {right}")]
    DomainMismatch { left: Domain, right: Domain },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resource limit exceeded: {what} (attempted {attempted}, cap {cap})")]
    ResourceLimit {
        what: String,
        attempted: u128,
        cap: u128,
    },

    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn resource_limit(what: impl Into<String>, attempted: u128, cap: u128) -> Error {
    Error::ResourceLimit {
        what: what.into(),
        attempted,
        cap,
    }
}
