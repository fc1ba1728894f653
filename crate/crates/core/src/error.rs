use thiserror::Error;

/// Failures reported by the numeric operations.
///
/// The variants line up with the CLI exit-code contract: validation and
/// domain problems are input errors, enclosure failures mean the requested
/// truncation cannot certify a bracket.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("invalid value at index {index}: {message}")]
    InvalidIndex { index: usize, message: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("enclosure failure: truncation N = {requested} is too small for t = {t}; use N >= {suggested}")]
    Enclosure {
        t: f64,
        requested: usize,
        suggested: usize,
    },
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors caused by the input document or arguments.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Enclosure { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
