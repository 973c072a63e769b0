use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
///
/// Variants are grouped by the stage that raises them so the CLI can map
/// them onto stable exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("missing upstream artifact {path}; run `fader {stage}` first")]
    MissingArtifact { path: PathBuf, stage: String },

    #[error("corrupt data: {0}")]
    CorruptData(String),

    #[error("training diverged: {0}")]
    Training(String),

    #[error("{0}")]
    Other(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::InvalidConfig(_) => 2,
            Error::Io { .. } | Error::Parse { .. } => 3,
            Error::MissingArtifact { .. } => 4,
            Error::CorruptData(_) => 5,
            Error::Training(_) => 6,
            Error::Other(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
