use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The caller violated an operation's precondition.
    #[error("usage error: {0}")]
    Usage(String),
    /// The input describes an object outside the supported domain
    /// (non-positive generators, non-coprime sequence parameters, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A configured size cap was hit (fiber cardinality, table size).
    #[error("resource limit exceeded: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn resource(msg: impl Into<String>) -> Error {
    Error::Resource(msg.into())
}
