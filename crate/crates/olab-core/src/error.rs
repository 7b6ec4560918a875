//! Error type shared by every module of the library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("ball contains no cells: {0}")]
    EmptyBall(String),
    #[error("dyadic depth {depth} does not align with a cube of {side} cells")]
    Misaligned { depth: u32, side: usize },
    #[error("missing auxiliary function `{0}` for this pairing kind")]
    MissingAux(&'static str),
    #[error("integral diverges: {0}")]
    Divergent(String),
    #[error("unknown property `{0}`")]
    UnknownProperty(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
