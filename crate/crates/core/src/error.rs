use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    Validation(String),

    #[error("agent {agent} out of range 1..={n}")]
    AgentOutOfRange { agent: u64, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown instance `{0}`")]
    UnknownInstance(String),

    #[error("unknown mechanism `{0}`")]
    UnknownMechanism(String),

    /// The requested enumeration would exceed the configured bound.
    #[error("too large for exact engine: {what} needs {required} paths, bound is {bound}")]
    TooLarge {
        what: String,
        required: String,
        bound: u128,
    },

    #[error("incomplete function table: {0}")]
    IncompleteTable(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
