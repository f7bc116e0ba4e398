use thiserror::Error;

use crate::protocols::ProtocolTrace;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {dim} exceeds the configured maximum {max}")]
    Size { dim: usize, max: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid quantum object: {0}")]
    Validity(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported representation: {0}")]
    UnsupportedRepresentation(String),

    #[error("protocol failure: {reason}")]
    ProtocolFailure {
        reason: String,
        trace: Box<ProtocolTrace>,
    },
}

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn validity(msg: impl Into<String>) -> Self {
        Error::Validity(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
