use thiserror::Error;

/// Errors raised by the embedding, transport and measure routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("point buffer of length {len} is not a multiple of dimension {dim}")]
    Shape { len: usize, dim: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("negative weight {value} at index {index}")]
    NegativeWeight { index: usize, value: f64 },

    #[error("weights sum to {0}, expected 1 within 1e-12")]
    NotNormalized(f64),

    #[error("measure has zero total mass")]
    ZeroMass,

    #[error("direction has norm {0}, expected a unit vector")]
    NotUnit(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("projected support values tie in direction {direction}; gradient undefined")]
    TiedProjection { direction: usize },

    #[error("support size {size} exceeds the exact solver limit of {limit}; use sliced estimation instead")]
    TooLarge { size: usize, limit: usize },

    #[error("measures are not supported on a common line through the origin")]
    NotCollinear,

    #[error("transport simplex failed: {0}")]
    Solver(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("variant mismatch: {0:?} vs {1:?}")]
    VariantMismatch(crate::fsw::Variant, crate::fsw::Variant),
}

pub type Result<T> = std::result::Result<T, Error>;
