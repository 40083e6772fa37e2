use thiserror::Error;

/// Errors produced by grid construction, field algebra and the stepper.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch between operands")]
    GridMismatch,
    #[error("frame mismatch: expected {expected:?}, got {got:?}")]
    FrameMismatch {
        expected: crate::field::Frame,
        got: crate::field::Frame,
    },
    #[error("time mismatch between fields: {0} vs {1}")]
    TimeMismatch(f64, f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("non-finite value encountered at t = {0}")]
    NonFinite(f64),
    #[error("rate fit window too short: {0}")]
    WindowTooShort(String),
    #[error("checkpoint format error: {0}")]
    CheckpointFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
