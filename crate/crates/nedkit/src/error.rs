use thiserror::Error;

/// Errors produced anywhere in the disambiguation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed record at line {line}: {message}")]
    MalformedRecord { line: usize, message: String },

    #[error("duplicate entity id `{id}` at line {line}")]
    DuplicateEntityId { id: String, line: usize },

    #[error("entity `{0}` not found")]
    EntityNotFound(String),

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("empty query document")]
    EmptyQueryDocument,

    #[error("missing gold label for query `{0}`")]
    MissingGold(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("deadline exceeded")]
    Timeout,

    #[error("bad index file: {0}")]
    BadIndexFile(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
