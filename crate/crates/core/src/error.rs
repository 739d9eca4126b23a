use thiserror::Error;

/// Errors surfaced by the engine. The CLI maps these onto exit codes:
/// configuration/parse problems exit 1, missing data exits 2, unsupported
/// configurations exit 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("series context mismatch: {0}")]
    ContextMismatch(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("missing data: {0}")]
    MissingData(String),

    #[error("missing base value: {0}")]
    MissingBase(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
