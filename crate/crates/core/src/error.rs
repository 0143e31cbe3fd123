use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Operand shapes or subsystem factorizations do not line up.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// A product or factorization would exceed the supported total dimension.
    #[error("size error: dimension {requested} exceeds cap {cap}")]
    Size { requested: usize, cap: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    /// A numerical postcondition was violated (non-Hermitian input,
    /// probability outside [0, 1], complex residue in a real quantity).
    #[error("numeric contract violated: {0}")]
    Contract(String),

    /// A channel broke trace preservation or complete positivity.
    #[error("channel contract violated: {0}")]
    Channel(String),

    /// Two independent evaluation routes disagreed.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("config error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
