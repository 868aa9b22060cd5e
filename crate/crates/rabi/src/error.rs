use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Numerical(#[from] rabi_core::Error),

    #[error("bad configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}: plot rendering failed: {detail}")]
    Plot { path: PathBuf, detail: String },

    #[error("thread pool: {0}")]
    Pool(String),

    /// Some sweep cells failed; the rest of the sweep was written.
    #[error("{failed} of {total} cells failed")]
    Cells { failed: usize, total: usize },
}

impl Error {
    /// Process exit code: 2 for unusable input, 3 for everything that went
    /// wrong while computing or writing.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Numerical(rabi_core::Error::InvalidParameter(_)) => 2,
            _ => 3,
        }
    }
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}
