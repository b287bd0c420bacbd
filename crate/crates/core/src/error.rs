use thiserror::Error;

/// Errors raised while building a knowledge store, parsing input, or running a query.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid symbol token {token:?}: {reason}")]
    InvalidToken { token: String, reason: &'static str },

    #[error("pattern rejected at occurrence {index}: {reason}")]
    Validation { index: usize, reason: String },

    #[error("frequency must be at least 1")]
    ZeroFrequency,

    #[error("pattern must contain at least one symbol")]
    EmptyPattern,

    #[error("duplicate pattern label {0:?}")]
    DuplicateLabel(String),

    #[error("knowledge store is sealed")]
    Sealed,

    #[error("knowledge store is not sealed")]
    NotSealed,

    #[error("knowledge store has no patterns")]
    EmptyStore,

    #[error("{file}:{line}: {message} (at {token:?})")]
    Syntax {
        file: String,
        line: usize,
        token: String,
        message: String,
    },

    #[error("search parameter `{0}` must be positive")]
    InvalidParameter(&'static str),

    #[error("query is empty")]
    EmptyQuery,

    #[error("instance exceeds oracle limits: {0}")]
    OracleLimit(String),

    #[error("{}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))]
    Diagnostics(Vec<Error>),

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
