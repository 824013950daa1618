use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid epsilon sequence: {0}")]
    InvalidEpsilon(String),

    #[error("invalid alpha sequence at index {index}: {reason}")]
    InvalidAlpha { index: usize, reason: String },

    #[error("invalid truncated space: dim {dim}, guard {guard}")]
    InvalidSpace { dim: usize, guard: usize },

    #[error("map is not Hermitian (relative defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("ill-conditioned map: condition estimate {cond:.3e} exceeds cap {cap:.3e}")]
    Conditioning { cond: f64, cap: f64 },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("resolvent singular: lambda = {lambda} lies {distance:.3e} from the eigenvalue set (margin {margin:.1e})")]
    ResolventSingularity {
        lambda: num_complex::Complex64,
        distance: f64,
        margin: f64,
    },

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("guard band {guard} too small, need at least {required}")]
    GuardTooSmall { guard: usize, required: usize },

    #[error("division by zero coefficient at index {0}")]
    ZeroCoefficient(usize),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
