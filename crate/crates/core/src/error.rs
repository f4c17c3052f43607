use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("characteristic must be an odd prime, got {0}")]
    NotOddPrime(u64),
    #[error("extension degree must be at least 1, got {0}")]
    DegreeTooSmall(u32),
    #[error("field size {q} exceeds the enumeration limit {limit}")]
    FieldTooLarge { q: u128, limit: u64 },
    #[error("element index {index} is out of range for a field of {q} elements")]
    IndexOutOfRange { index: u64, q: u64 },
    #[error("coefficient vector of length {got} does not match extension degree {expected}")]
    BadCoefficientLength { got: usize, expected: usize },
    #[error("inverse of zero requested")]
    DivisionByZero,
    #[error("leading coefficient of the quadratic must be nonzero")]
    ZeroLeadingCoefficient,
    #[error("multiplier c = {0} is not allowed here (expected c outside {{0, 1, -1}})")]
    DegenerateMultiplier(String),
    #[error("multiplier c = 1 is out of scope")]
    COneOutOfScope,
    #[error("curve y^2 = x(x-1)(x-c^2) is singular for this c")]
    SingularCurve,
    #[error("input trace {t} violates the Hasse bound for q = {q}")]
    HasseViolation { t: i64, q: u64 },
    #[error("{0} is not a prime congruent to 1 mod 4")]
    NotOneModFour(u64),
    #[error("element is not a square root of -1 in this field")]
    NotSquareRootOfMinusOne,
    #[error("case not covered by these closed forms: {0}")]
    UnsupportedCase(String),
    #[error("internal consistency check failed: {0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
