use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("stability index must lie in (0, 2], got {0}")]
    InvalidAlpha(f64),

    #[error("invalid spectral measure: {0}")]
    InvalidMeasure(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("empty sample")]
    EmptySample,

    #[error("out of regime: {0}")]
    OutOfRegime(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported workspace: {0}")]
    UnsupportedWorkspace(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
