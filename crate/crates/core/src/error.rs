use thiserror::Error;

/// Errors raised while validating inputs or running the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("weight sequence violates its invariants at index {index}: {reason}")]
    WeightViolation { index: usize, reason: &'static str },

    #[error("invalid tail model: {0}")]
    InvalidTail(&'static str),

    #[error("exponent {name} = {value} outside {expected}")]
    InvalidExponent {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid information model: {0}")]
    InvalidInfo(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("eps = {eps} is outside the bracket [{lower}, {upper}]")]
    OutOfBracket { eps: f64, lower: f64, upper: f64 },

    #[error("bracket {bracket} is degenerate: the top {} weights tie, so the equation is constant below lambda = 1", bracket + 1)]
    DegenerateBracket { bracket: usize },

    #[error("interpolation solver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("truncation index search exceeded {cap} indices without bracketing eps")]
    NoTermination { cap: usize },

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("oracle dimension {dimension} exceeds the cap {max}")]
    DimensionTooLarge { dimension: usize, max: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn exponent(name: &'static str, value: f64, expected: &'static str) -> Error {
    Error::InvalidExponent {
        name,
        value,
        expected,
    }
}
