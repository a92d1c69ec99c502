use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("field of size {0} is larger than supported (at most 65536 elements)")]
    FieldTooLarge(u64),
    #[error("no irreducible polynomial found within the retry budget")]
    NoIrreducible,
    #[error("enumerating {count} points exceeds the cap of {cap}")]
    CapExceeded { count: u128, cap: u128 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("index range {t1}..={t2} is invalid for length {len}")]
    IndexRange { t1: usize, t2: usize, len: usize },
    #[error("cannot evaluate at the place at infinity")]
    EvalAtInfinity,
    #[error("series is zero to the computed precision")]
    ZeroSeries,
    #[error("unsupported branch structure: {0}")]
    Branch(String),
    #[error("no valid check block found for block {block}")]
    EncodingFailure { block: usize },
    #[error("word is not in the range of the encoder")]
    NotInRange,
    #[error("{count} candidates at level {level} exceed the cap of {cap}")]
    CandidateExplosion { level: usize, count: usize, cap: usize },
    #[error("superblock direction spaces differ, so the coarsened space is not periodic")]
    NonUniformCoupling,
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
