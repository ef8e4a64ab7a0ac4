use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero direction")]
    ZeroDirection,
    #[error("not a proper curve: rank < n-1")]
    RankDeficient,
    #[error("vector is not primitive (gcd {0})")]
    NotPrimitive(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("identically zero equation")]
    ZeroEquation,
    #[error("inconsistent variable set: {0}")]
    InconsistentVariables(String),
    #[error("exponent overflow")]
    ExponentOverflow,
    #[error("not binomial: equation {0} has {1} terms")]
    NotBinomial(usize, usize),
    #[error("not finitely many roots")]
    Singular,
    #[error("degenerate lifting: reseed")]
    DegenerateLifting,
    #[error("monomial equation: no tropisms")]
    MonomialEquation,
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("wrong shape: {0}")]
    Shape(String),
    #[error("empty input")]
    EmptyInput,
    #[error("path tracking failed on {0} paths")]
    PathFailure(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
