use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("field order {p}^{s} exceeds 2^16")]
    FieldTooLarge { p: u32, s: u32 },
    #[error("invalid field descriptor {0:?}, expected p^s")]
    BadFieldSpec(String),
    #[error("zero has no multiplicative inverse")]
    DivisionByZero,
    #[error("{what} = {value} is outside {range}")]
    Domain { what: &'static str, value: f64, range: &'static str },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("element {0} is not in the field")]
    InvalidElement(u32),
    #[error("restricted generator has rank {rank} < {k}")]
    RankDeficient { rank: usize, k: usize },
    #[error("singular system")]
    SingularSystem,
    #[error("enumeration of {needed} items exceeds budget {budget}")]
    BudgetExceeded { needed: f64, budget: u64 },
    #[error("no codeword of the target weight after {rounds} rounds")]
    NoHit { rounds: usize },
    #[error("only {kept} coordinates kept, {needed} needed")]
    TooFewKept { kept: usize, needed: usize },
    #[error("no acceptable revealed set after {attempts} draws")]
    JRejected { attempts: usize },
    #[error("dual of the punctured code is trivial")]
    DegenerateDual,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(what: &'static str, value: f64, range: &'static str) -> Error {
    Error::Domain { what, value, range }
}
