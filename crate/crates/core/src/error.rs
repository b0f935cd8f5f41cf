use thiserror::Error;

/// Errors produced by kernel evaluation, certification and the statistics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index {index} out of range for size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("point is not on the unit sphere (norm {norm})")]
    NotUnitNorm { norm: f64 },

    #[error("kernel is not conditionally negative definite: radicand {radicand}")]
    NotCnd { radicand: f64 },

    #[error("kernel is not positive definite independent: value {value}")]
    NotPdi { value: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not symmetric (max asymmetry {max_asymmetry})")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("coefficient grid violates zero row/column sums (max |sum| {max_sum})")]
    ConstraintViolation { max_sum: f64 },

    #[error("symmetric eigensolver did not converge")]
    EigenNonConvergence,

    #[error("weights must sum to zero (sum {sum})")]
    WeightSum { sum: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("kernel spec is not centered")]
    NotCentered,

    #[error("degenerate witness: kernel value is zero")]
    DegenerateWitness,

    #[error("quadrature grid too coarse: self-check residual {residual}")]
    GridTooCoarse { residual: f64 },

    #[error("sample too small: need at least {min}, got {got}")]
    SampleTooSmall { min: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
