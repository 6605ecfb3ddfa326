use thiserror::Error;

pub type Result<T> = std::result::Result<T, DsError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DsError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Integer arithmetic left the 64/128-bit range.
    #[error("range error: {0}")]
    Range(String),

    /// The input sits on a pole of the requested function.
    #[error("singular input: {0}")]
    Singular(String),

    #[error("no root: {0}")]
    NoRoot(String),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
}

impl DsError {
    /// Short machine-readable code, used by the CLI error output.
    pub fn code(&self) -> &'static str {
        match self {
            DsError::InvalidArgument(_) => "invalid-argument",
            DsError::Range(_) => "range",
            DsError::Singular(_) => "singular-input",
            DsError::NoRoot(_) => "no-root",
            DsError::Parse { .. } => "parse",
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        DsError::InvalidArgument(msg.into())
    }

    pub(crate) fn range(msg: impl Into<String>) -> Self {
        DsError::Range(msg.into())
    }
}
