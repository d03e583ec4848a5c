use std::path::PathBuf;

/// Errors shared across the crate.
///
/// The CLI maps these onto its exit-code contract: configuration and usage
/// problems, data-integrity failures, and resource exhaustion are kept
/// distinguishable all the way up.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed tree encoding: {0}")]
    MalformedTree(String),

    #[error("decode error: {0}")]
    Decode(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("integrity check failed: {0}")]
    Integrity(String),

    #[error("integrity check failed for {path}: {reason}")]
    FileIntegrity { path: PathBuf, reason: String },

    #[error("memory budget exceeded: {0}")]
    MemoryBudget(String),

    #[error("numerical method did not converge: {0}")]
    NonConvergence(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
