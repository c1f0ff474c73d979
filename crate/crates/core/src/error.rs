use thiserror::Error;

use crate::witness::TrialSummary;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid connection set: {0}")]
    InvalidConnectionSet(String),

    #[error("{what}: size {size} exceeds the limit {limit}")]
    SizeLimit { what: &'static str, size: usize, limit: usize },

    /// A cross-check between two computations of the same quantity disagreed.
    /// This signals a bug, never bad input.
    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("witness extraction failed after {tries} tries")]
    ExtractionFailed { tries: usize, best: Option<Box<TrialSummary>> },

    #[error("parse error: {0}")]
    Parse(String),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
