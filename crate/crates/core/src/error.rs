use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: row {row} has {found} entries, expected {expected}")]
    DimensionMismatch {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("label error: {0}")]
    Label(String),

    #[error("position {position} out of range for universe of size {len}")]
    Position { position: usize, len: usize },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A computation would exceed a configured size limit.
    #[error("resource limit: {what} requires {required}, limit is {limit}")]
    Resource {
        what: String,
        required: String,
        limit: String,
    },

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("certificate precondition: {0}")]
    Certificate(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn resource(
        what: impl Into<String>,
        required: impl ToString,
        limit: impl ToString,
    ) -> Self {
        Error::Resource {
            what: what.into(),
            required: required.to_string(),
            limit: limit.to_string(),
        }
    }

    /// Short machine-readable tag used in CLI reason lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::Label(_) => "label",
            Error::Position { .. } => "position",
            Error::Input(_) => "input",
            Error::Parse { .. } => "parse",
            Error::Resource { .. } => "resource",
            Error::Protocol(_) => "protocol",
            Error::Certificate(_) => "certificate",
            Error::Validation(_) => "validation",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
