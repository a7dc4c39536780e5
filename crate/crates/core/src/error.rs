use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed JSON input.
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    /// Well-formed input that violates a network invariant.
    #[error("invalid network: {0}")]
    Invalid(String),

    /// An argument outside the domain of a formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// Usage budgets do not match what the operation requires.
    #[error("budget mismatch: {0}")]
    BudgetMismatch(String),

    /// A rate model could not produce a rate for an edge.
    #[error("unresolvable rate for edge `{0}`")]
    UnresolvedRate(String),

    /// Instance too large for an exhaustive or exact computation.
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("ratio undefined: lower bound is zero (upper bound {upper})")]
    UndefinedRatio { upper: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
