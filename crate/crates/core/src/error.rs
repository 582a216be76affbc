use thiserror::Error;

/// Errors shared by all laboratory modules.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation argument is outside its documented range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Two grid functions that must share a layout do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A documented precondition does not hold for the given input.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Not enough (uncensored) data to perform the requested computation.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
