use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("expected {expected} matrix entries, got {got}")]
    EntryCount { expected: usize, got: usize },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("index {index} out of range for dimension {bound}")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("index {0} appears more than once")]
    RepeatedIndex(usize),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("size {n} exceeds the supported maximum {max}")]
    TooLarge { n: usize, max: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("amplitudes are not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("cannot normalize a state of zero norm")]
    ZeroNorm,

    #[error("invalid Gram matrix: {0}")]
    InvalidGram(String),

    #[error("matrix is not unitary (defect {0:e})")]
    NotUnitary(f64),

    #[error("expected {expected} particles, got {got}")]
    ParticleCount { expected: u32, got: u32 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid search spec: {0}")]
    InvalidSpec(String),

    #[error("oracle mismatch: max amplitude difference {0:e}")]
    OracleMismatch(f64),

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
