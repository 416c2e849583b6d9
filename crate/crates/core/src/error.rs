use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("expected a {expected}x{expected} matrix ({} values), got {got} values", expected * expected)]
    NotSquare { expected: usize, got: usize },
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("matrix entry ({row}, {col}) is {value}; expected a finite nonnegative value")]
    InvalidEntry { row: usize, col: usize, value: f64 },
    #[error("matrix diagonal entry {index} is nonzero")]
    NonZeroDiagonal { index: usize },
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("unknown id `{0}`")]
    UnknownId(String),
    #[error("id sets differ between inputs")]
    IdSetMismatch,
    #[error("need at least {needed} values, got {got}")]
    TooFewValues { needed: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("series `{id}` contains a missing or non-finite value at sample {index}")]
    MissingValue { id: String, index: usize },
    #[error("edge ({a}, {b}) is invalid: {reason}")]
    InvalidEdge { a: usize, b: usize, reason: &'static str },
}
