use thiserror::Error;

/// Errors raised by the library. Negative membership answers are not errors;
/// they are reported through [`crate::MembershipResult`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("{element} is not an element of {monoid}")]
    NotAMember { element: String, monoid: String },

    #[error("operation not applicable: {0}")]
    NotApplicable(String),

    #[error("integer {0} is beyond the factorization limit")]
    FactorizationLimit(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(position: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            position,
            message: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
