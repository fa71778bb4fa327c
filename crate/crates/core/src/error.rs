use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("size bound exceeded: {what} needs {needed}, limit is {limit}")]
    SizeBoundExceeded {
        what: String,
        needed: u128,
        limit: u128,
    },
    #[error("relation `{name}` is not algebraic: {detail}")]
    NotAlgebraic { name: String, detail: String },
    #[error("signature mismatch between `{left}` and `{right}`")]
    SignatureMismatch { left: String, right: String },
    #[error("no structure morphisms exist from `{0}`")]
    EmptyHomset(String),
    #[error("certificate mismatch: {0}")]
    CertificateMismatch(String),
    #[error("catalog self-validation failed for `{id}`: {detail}")]
    SelfValidationFailed { id: String, detail: String },
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn size(what: impl Into<String>, needed: u128, limit: u128) -> Self {
        Error::SizeBoundExceeded {
            what: what.into(),
            needed,
            limit,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
