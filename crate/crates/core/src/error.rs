use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("mismatch: {0}")]
    Mismatch(String),

    #[error("infeasible target ({rule}): {lhs} < {rhs}")]
    Infeasible { rule: String, lhs: i64, rhs: i64 },

    #[error("step {position} failed: {reason}")]
    Replay { position: usize, reason: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
