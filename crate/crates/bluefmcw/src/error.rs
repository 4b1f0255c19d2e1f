use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value (or combination of values) is invalid.
    #[error("configuration error: {0}")]
    Config(String),
    /// An operation was called with an out-of-contract argument.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// File or stream I/O failed.
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
