use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("mixed exact and approximate operands")]
    BackendMismatch,
    #[error("parameter constraint violated, residual {residual}")]
    Constraint { residual: String },
    #[error("permutation {0} does not fix 1")]
    PrefixMovesOne(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("matrix is not orthogonal")]
    NotOrthogonal,
    #[error("matrix is not in the span of permutation matrices")]
    NotInSpan,
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
