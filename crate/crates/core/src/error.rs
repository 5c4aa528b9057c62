use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument or configuration value is out of its valid range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A file could not be parsed or violates the schema.
    #[error("format error in `{field}`: {message}")]
    Format { field: String, message: String },

    /// Two inputs that must describe the same problem do not agree.
    #[error("mismatch: {0}")]
    Mismatch(String),

    /// No feasible topology exists (or none could be found where one is required).
    #[error("unsatisfiable: {0}")]
    Unsatisfiable(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn format(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format {
            field: field.into(),
            message: message.into(),
        }
    }
}
