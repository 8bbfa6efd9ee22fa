use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HurwitzError {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("degree mismatch: sum(mu) = {mu} but sum(nu) = {nu}")]
    DegreeMismatch { mu: u64, nu: u64 },
    #[error("r = 2g - 2 + m + n = {0} is negative")]
    NegativeR(i64),
    #[error("r = 0: graph methods are undefined, use the permutation method")]
    RZero,
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("V - E + F = {0} is odd, genus is not an integer")]
    NonIntegerGenus(i64),
    #[error("trace from tick {0} did not reach another tick")]
    NonterminatingTrace(usize),
    #[error("invalid chain: {0}")]
    InvalidChain(String),
    #[error("inconsistent tropicalization fiber: {0}")]
    InconsistentFiber(String),
    #[error("point lies on a wall: {0}")]
    OnWall(String),
    #[error("fit failed at sample point {point:?}: expected {expected}, polynomial gives {got}")]
    FitFailed {
        point: Vec<i64>,
        expected: String,
        got: String,
    },
    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, HurwitzError>;
