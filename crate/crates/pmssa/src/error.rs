use std::io;
use std::path::PathBuf;

/// Errors raised by file handling, spectral tools and the CLI.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] pmssa_core::Error),

    #[error("invalid argument `{name}`: {message}")]
    Argument { name: &'static str, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    /// Bad magic, unsupported version or unparsable text.
    #[error("{}: format error: {message}", path.display())]
    Format { path: PathBuf, message: String },

    /// Header and payload sizes disagree.
    #[error("{}: truncated: {message}", path.display())]
    Truncated { path: PathBuf, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn argument(name: &'static str, message: impl Into<String>) -> Self {
        Error::Argument {
            name,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit status: 2 for bad arguments, 3 for I/O and file
    /// contents, 4 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        use pmssa_core::Error as Core;
        match self {
            Error::Argument { .. } | Error::Core(Core::Argument { .. }) | Error::Core(Core::Precondition(_)) => 2,
            Error::Io { .. } | Error::Format { .. } | Error::Truncated { .. } | Error::Core(Core::Validation(_)) => 3,
            Error::Core(Core::Numeric(_)) => 4,
        }
    }
}
