use thiserror::Error;

/// Errors raised by the transforms, the field containers and the file format.
#[derive(Debug, Error)]
pub enum ArtError {
    /// A point or ray left the admissible domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter violated an operation's precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A grid file could not be decoded.
    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ArtError {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        ArtError::Argument(msg.into())
    }

    pub(crate) fn format(offset: u64, msg: impl Into<String>) -> Self {
        ArtError::Format {
            offset,
            message: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, ArtError>;
