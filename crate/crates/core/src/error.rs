use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid dimension {n}: {reason}")]
    InvalidDimension { n: usize, reason: &'static str },

    #[error("coordinate index {index} out of range for dimension {n}")]
    CoordinateOutOfRange { index: usize, n: usize },

    #[error("step index {index} out of range for a driving sequence of length {len}")]
    StepOutOfRange { index: usize, len: usize },

    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is singular over GF(2)")]
    SingularMatrix,

    #[error(
        "chain Q2 needs an even dimension n = 2m (odd lengths are not supported), got n = {0}"
    )]
    OddDimension(usize),

    #[error(
        "exact distribution over 2^{n} states needs about {bytes} bytes; dimension guard is {guard}"
    )]
    DimensionTooLarge { n: usize, guard: usize, bytes: u128 },

    #[error("time {t} exceeds dimension {n}; the formula holds only for t <= n")]
    TimeExceedsDimension { t: usize, n: usize },

    #[error("degenerate window: delta = {delta} <= 0, the Chebyshev bound is vacuous")]
    DegenerateWindow { delta: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}
