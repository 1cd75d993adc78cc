use thiserror::Error;

/// Failure kinds shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("layout error: {0}")]
    Layout(String),

    #[error("invalid state: {0}")]
    State(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("witness error: {0}")]
    Witness(String),

    #[error("decode error: {0}")]
    Decode(String),

    #[error("composition error: {0}")]
    Composition(String),

    #[error("not implemented: {0}")]
    NotImplemented(String),

    #[error("scale guard: dimension {dim} exceeds the limit {limit} (set EACQ_MAX_DIM to override)")]
    Scale { dim: usize, limit: usize },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn layout_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Layout(msg.into()))
}

pub(crate) fn domain_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
