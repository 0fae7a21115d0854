use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("element does not belong to the group: {0}")]
    GroupMismatch(String),
    #[error("not a well-defined endomorphism: {0}")]
    NotEndomorphism(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("{0} is not a unit modulo {1}")]
    NotAUnit(i128, i128),
    #[error("gcd({0}, {1}, {2}) is not 1")]
    NotCoprime(i128, i128, i128),
    #[error("matrix is not invertible: {0}")]
    NotInvertible(String),
    #[error("invalid degree matrix: {0}")]
    InvalidDegreeMatrix(String),
    #[error("invalid generator matrix: {0}")]
    InvalidGeneratorMatrix(String),
    #[error("matrix has deficient rank")]
    RankDeficient,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("integer overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
