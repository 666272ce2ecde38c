use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("mismatched ambient bases")]
    AmbientMismatch,
    #[error("element is not homogeneous")]
    NotHomogeneous,
    #[error("squaring requires an odd-degree homogeneous element (got degree {0})")]
    EvenSquare(u32),
    #[error("form is not invertible over the working ring")]
    NotInvertible,
    #[error("form is not symmetric")]
    NotSymmetric,
    #[error("rank {rank} is below the required minimum {min}")]
    RankTooSmall { rank: usize, min: usize },
    #[error("vector is not primitive (gcd of coordinates is {0})")]
    NotPrimitive(String),
    #[error("search exhausted at coordinate bound {bound}: {what}")]
    SearchExhausted { bound: i64, what: String },
    #[error("degree {degree} exceeds the configured bound {bound}")]
    DegreeOverBound { degree: u32, bound: u32 },
    #[error("inconsistent series: {0}")]
    InconsistentSeries(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("no applicable rule for subterm `{0}`")]
    NoApplicableRule(String),
    #[error("degree error: {0}")]
    Degree(String),
    #[error("table error: {0}")]
    Table(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no construction found: {0}")]
    NoConstruction(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
