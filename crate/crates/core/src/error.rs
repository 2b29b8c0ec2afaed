use thiserror::Error;

/// Errors split by how the caller should react: bad input, bad math, or a
/// violated identity that should have been impossible.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid speed set: {0}")]
    InvalidSpeeds(String),

    #[error("{0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// An exact identity failed. Seeing this means either a bug or a genuine
    /// counterexample; it is never swallowed.
    #[error("falsified: {0}")]
    Falsified(String),

    #[error("internal: {0}")]
    Internal(String),
}

impl Error {
    /// True for the variants that contradict a proved statement rather than
    /// flag bad input.
    pub fn is_falsification(&self) -> bool {
        matches!(self, Error::Falsified(_) | Error::Internal(_))
    }
}
