use alloc::string::String;

/// Failures raised by the exact pipelines.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero input to {0}")]
    ZeroInput(&'static str),
    #[error("expected degree {expected}, got {got}")]
    WrongDegree { expected: usize, got: usize },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("degenerate construction: {0}")]
    Degenerate(String),
    #[error("point not on curve: {0}")]
    NotOnCurve(String),
    #[error("pole or zero at specialization: {0}")]
    BadSpecialization(String),
    #[error("bad prime {0}")]
    BadPrime(u64),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = core::result::Result<T, Error>;
