use std::io;
use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    /// The file does not parse; `location` names the row, line or record.
    #[error("{}: {location}: {message}", path.display())]
    Malformed {
        path: PathBuf,
        location: String,
        message: String,
    },

    /// The file parses but breaks a data invariant.
    #[error("{}: {source}", path.display())]
    Invalid {
        path: PathBuf,
        source: ieat_core::Error,
    },

    #[error(transparent)]
    Core(#[from] ieat_core::Error),

    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn malformed(
        path: impl Into<PathBuf>,
        location: impl Into<String>,
        message: impl ToString,
    ) -> Self {
        Error::Malformed {
            path: path.into(),
            location: location.into(),
            message: message.to_string(),
        }
    }

    pub(crate) fn invalid(path: impl Into<PathBuf>, source: ieat_core::Error) -> Self {
        Error::Invalid {
            path: path.into(),
            source,
        }
    }
}
