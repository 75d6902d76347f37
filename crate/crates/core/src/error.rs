use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A special function was evaluated outside its domain.
    #[error("domain error in {function}: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },
    /// A caller-supplied argument violates a precondition.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// A component or mixture parameter is invalid.
    #[error("invalid parameter `{field}`: {detail}")]
    Parameter { field: &'static str, detail: String },
    /// A computation produced a value that cannot be used (zero proposal
    /// density, non-finite log-ratio, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }

    pub(crate) fn argument(detail: impl Into<String>) -> Self {
        Error::Argument(detail.into())
    }

    pub(crate) fn parameter(field: &'static str, detail: impl Into<String>) -> Self {
        Error::Parameter {
            field,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
