use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid precision: {0}")]
    InvalidPrecision(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown identity id `{0}`")]
    UnknownIdentity(String),

    /// The working precision is too small for the requested computation.
    #[error("insufficient precision: {0}")]
    PrecisionTooLow(String),

    #[error("catalog parse error on line {line}: {message}")]
    Catalog { line: usize, message: String },

    #[error("expression parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
