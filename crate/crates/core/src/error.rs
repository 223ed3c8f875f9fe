use std::fmt;

/// Errors surfaced by the library. Status outcomes such as LP infeasibility
/// are not errors; they are carried in the result types.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    #[error("wrong instance class: {0}")]
    Class(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unbounded relaxation: {0}")]
    Unbounded(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn validation(msg: impl fmt::Display) -> Self {
        Error::Validation(msg.to_string())
    }

    pub fn precondition(msg: impl fmt::Display) -> Self {
        Error::Precondition(msg.to_string())
    }
}
