use thiserror::Error;

/// Every fallible operation in the crate reports one of these kinds.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Input outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A configured enumeration cap would be exceeded.
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    #[error("normal form unavailable: {0}")]
    NormalForm(String),
    #[error("no solution: {0}")]
    Solve(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("singular construction: {0}")]
    Singularity(String),
    /// An internal cross-check disagreed. Always a bug or a false premise.
    #[error("consistency check failed: {0}")]
    Consistency(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn consistency(msg: impl Into<String>) -> Error {
    Error::Consistency(msg.into())
}
