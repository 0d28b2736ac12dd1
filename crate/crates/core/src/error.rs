use std::path::PathBuf;

/// Errors produced by trajprune.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A value violates a domain invariant (non-finite coordinate, empty
    /// trajectory, duplicate id, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// Parameters are inconsistent or out of range.
    #[error("configuration error: {0}")]
    Config(String),

    /// A dataset or snapshot line could not be parsed.
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    /// A probability distribution with zero mass was requested.
    #[error("undefined distribution: {0}")]
    UndefinedDistribution(&'static str),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for I/O failures, false for data and configuration problems.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
