use thiserror::Error;

/// Failures surfaced by the reduction pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PencilError {
    /// Bad user input: non-finite entries, mismatched shapes, malformed index lists.
    #[error("input error: {0}")]
    Input(String),
    /// An internal structural assumption did not hold numerically
    /// (e.g. a stair block lost rank).
    #[error("contract violation: {0}")]
    Contract(String),
}

impl PencilError {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        PencilError::Input(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        PencilError::Contract(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, PencilError>;
