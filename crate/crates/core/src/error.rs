use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("dimension {0} is outside 1..={max}", max = crate::N_MAX)]
    DimensionTooLarge(usize),

    #[error("variable index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("cube of dimension {0} exceeds the enumeration cap")]
    CubeTooLarge(usize),

    #[error("degenerate cube: corners coincide")]
    DegenerateCube,

    #[error("eps must satisfy 0 < eps <= 1, got {0}")]
    InvalidEpsilon(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("distance work {work:.3e} exceeds cap {cap:.0e}")]
    WorkCapExceeded { work: f64, cap: f64 },

    #[error("fixture certification failed: achieved distance {achieved} < eps {eps}")]
    CertificationFailed { achieved: f64, eps: f64 },

    #[error("quantum charge must be at least 1")]
    ZeroCharge,

    #[error("tester precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse(err.to_string())
    }
}
