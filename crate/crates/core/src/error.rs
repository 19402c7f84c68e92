use alloc::string::String;

/// Errors raised by the core operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("q = {0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field of order {0} exceeds the supported table size")]
    FieldTooLarge(u64),
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("gcd of two zero polynomials")]
    GcdOfZeros,
    #[error("expected a monic nonzero polynomial")]
    NotMonic,
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("singular matrix")]
    Singular,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("lattice is not integral")]
    NotIntegral,
    #[error("invalid family index: {0}")]
    InvalidFamily(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("search budget exceeded: {0}")]
    Budget(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("observable has no invariance witness")]
    NoWitness,
}

pub type Result<T> = core::result::Result<T, Error>;
