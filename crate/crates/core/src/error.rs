use thiserror::Error;

pub type Result<T, E = CoherenceError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoherenceError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("channel is not complete: max |sum K^dag K - I| = {residual:e}")]
    IncompleteChannel { residual: f64 },

    #[error("invalid observable: {0}")]
    InvalidObservable(String),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("invalid T-transform: {0}")]
    InvalidTTransform(String),

    #[error("NotMajorized: source profile is not majorized by target profile")]
    NotMajorized,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid tolerance {name}: {value}")]
    InvalidTolerance { name: &'static str, value: f64 },
}
