use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A distribution description failed validation or parsing.
    #[error("invalid distribution: {0}")]
    InvalidDist(String),

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested computation exceeds an engine's size ceiling.
    #[error("refused: {0}")]
    Refused(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {msg}")]
    MatrixFile { path: PathBuf, msg: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code for the CLI: 2 for configuration problems, 3 for
    /// engine-ceiling refusals, 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Refused(_) => 3,
            Error::InvalidDist(_) | Error::Domain(_) | Error::Config(_) => 2,
            Error::MatrixFile { .. } | Error::Io { .. } => 1,
        }
    }
}
