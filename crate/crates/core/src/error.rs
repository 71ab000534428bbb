use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter is outside its valid range.
    #[error("invalid argument `{name}`: {message}")]
    Argument { name: &'static str, message: String },

    /// The input does not satisfy a structural precondition (e.g. missing grid).
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Matrix contents violate an invariant (non-finite values, wrong sizes).
    #[error("validation failed: {0}")]
    Validation(String),

    /// A factorization did not converge.
    #[error("numerical failure: {0}")]
    Numeric(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

impl Error {
    pub(crate) fn argument(name: &'static str, message: impl Into<String>) -> Self {
        Error::Argument {
            name,
            message: message.into(),
        }
    }
}
