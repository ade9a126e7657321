use crate::model::ModelFamily;

/// Errors shared by all modules of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("duplicate response for worker {worker} on question {question}")]
    DuplicateEntry { worker: u64, question: u64 },

    #[error("{what} index {got} out of range 1..={max}")]
    IndexOutOfRange {
        what: &'static str,
        got: u64,
        max: u64,
    },

    #[error("answer {got} outside {{0, 1}}")]
    AnswerOutOfRange { got: i64 },

    #[error("response matrix has no entries")]
    EmptyEntries,

    #[error("dimension mismatch: {what} has length {got}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },

    #[error("{name} = {value} outside [{lo}, {hi}]")]
    DomainViolation {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("objective diverges for {family} at x = {x}, w = {w}")]
    Singular { family: ModelFamily, x: f64, w: f64 },

    #[error("operation requires family {expected}, got {got}")]
    WrongFamily {
        expected: ModelFamily,
        got: ModelFamily,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
