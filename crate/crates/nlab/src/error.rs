//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, NlabError>;

#[derive(Debug, Error)]
pub enum NlabError {
    /// Caller passed arguments that violate a documented precondition.
    #[error("usage: {0}")]
    Usage(String),

    /// A query reached past the sieved range or past a function's domain.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// An asymptotic bound was requested below the x-threshold where it holds.
    #[error("below threshold: {0}")]
    Threshold(String),

    /// A certified invariant failed; results must not be trusted.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    /// Internal cross-check failed; indicates a bug in this crate.
    #[error("internal error: {0}")]
    Internal(String),

    /// A sieve cache file was missing, malformed, or failed validation.
    #[error("cache: {0}")]
    Cache(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl NlabError {
    pub fn usage(msg: impl Into<String>) -> Self {
        NlabError::Usage(msg.into())
    }

    pub fn out_of_range(msg: impl Into<String>) -> Self {
        NlabError::OutOfRange(msg.into())
    }

    pub fn threshold(msg: impl Into<String>) -> Self {
        NlabError::Threshold(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        NlabError::InvariantViolation(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        NlabError::Internal(msg.into())
    }

    pub fn cache(msg: impl Into<String>) -> Self {
        NlabError::Cache(msg.into())
    }

    /// Process exit code for this error: 1 for violated invariants or internal
    /// bugs (the output cannot be trusted), 2 for usage and environment
    /// problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            NlabError::InvariantViolation(_) | NlabError::Internal(_) => 1,
            _ => 2,
        }
    }
}
