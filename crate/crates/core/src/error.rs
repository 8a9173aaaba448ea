use thiserror::Error;

/// Errors raised by the analysis, quadrature and verification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("phase parameter modulus {0} outside [0, 1 - 1e-6]")]
    InvalidModulus(f64),

    #[error("phase parameter is not finite: {0}")]
    NonFiniteParameter(f64),

    #[error("grid of {points} points is too coarse: at least {required} points needed")]
    Undersampled { points: usize, required: usize },

    #[error("grid must have at least {min} points, got {points}")]
    GridTooSmall { points: usize, min: usize },

    #[error("grid size {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("integrand is not finite at node {index} (t = {t})")]
    NonFinite { index: usize, t: f64 },

    #[error("L^p exponent must satisfy p >= 1 (or be infinite), got {0}")]
    InvalidExponent(f64),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("signal '{0}' has no derivative rule")]
    NotDifferentiable(String),

    #[error("coefficient vector length {0} is not odd")]
    BadCoefficientLength(usize),

    #[error("phase parameters differ between operands")]
    PhaseMismatch,

    #[error("unknown signal specification '{0}'")]
    UnknownSignal(String),

    #[error("csv input: {0}")]
    Csv(String),

    #[error("linear system is singular")]
    Singular,
}

pub type Result<T> = std::result::Result<T, Error>;
