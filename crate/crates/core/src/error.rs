use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 2, got {0}")]
    DegreeTooSmall(usize),
    #[error("modulus polynomial is not monic of degree {0}")]
    NotMonic(usize),
    #[error("modulus polynomial is reducible over F_{0}")]
    Reducible(u64),
    #[error("field size {p}^{k} exceeds the supported ceiling 2^40")]
    Overflow { p: u64, k: usize },
    #[error("element has {got} coefficients, expected at most {expected}")]
    BadElement { got: usize, expected: usize },
    #[error("negative power of zero")]
    ZeroInverse,
    #[error("zero has no multiplicative order")]
    ZeroElement,
    #[error("element is not a primitive root")]
    NotPrimitive,
    #[error("initial values are all zero")]
    AllZeroInit,
    #[error("index pair ({0}, {0}) lies on the diagonal")]
    DiagonalIndex(usize),
    #[error("star discrepancy grid of {corners} corners exceeds the evaluation guard")]
    DimensionTooLarge { corners: u128 },
    #[error("digit {value} is outside the admissible range for base {base}")]
    OutOfRange { value: i64, base: u64 },
    #[error("point set carries no base-{0} digit expansion")]
    MissingDigits(u64),
    #[error("m = {m} is below floor(log_b N) = {min}")]
    MTooSmall { m: usize, min: usize },
    #[error("enumeration of {count} frequency matrices exceeds the guard")]
    EnumerationTooLarge { count: u128 },
    #[error("precondition violated: {0}")]
    PreconditionOutOfRange(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("problem too large: {0}")]
    TooLarge(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
