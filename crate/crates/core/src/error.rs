use thiserror::Error;

/// Errors raised by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violates the documented domain of an operation.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// The partition constants do not produce a valid covering.
    #[error("covering failure: {0}")]
    Covering(String),

    /// A truncation bound is too small for the requested computation.
    #[error("truncation error: {0}")]
    Truncation(String),

    /// A witness or grid cannot be placed with the requested geometry.
    #[error("geometry error: {0}")]
    Geometry(String),

    /// Text input could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// A numerical self-check failed.
    #[error("check failed: {0}")]
    Check(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
