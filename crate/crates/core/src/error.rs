use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// `(m, a)` with `m == 1`, `m < 0` or `a < 1`.
    #[error("({m},{a}) is not an element of P x| N^x")]
    NotInSemigroup { m: String, a: String },

    #[error("{0} is not an element of P = {{0,2,3,...}}")]
    NotInP(String),

    #[error("multiplicative part must be positive, got {0}")]
    NonPositiveScale(String),

    #[error("gcd({0}, {1}) != 1")]
    NotCoprime(String, String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid boundary measure: {0}")]
    Measure(String),

    #[error("boundary measure is not rational-valued at degree {0}; use floating-point evaluation")]
    NonExactMeasure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
