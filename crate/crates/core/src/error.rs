use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid trit {value} at position {position}")]
    InvalidTrit { position: usize, value: u8 },

    #[error("not a permutation of 1..={len}: {values:?}")]
    NotPermutation { len: usize, values: Vec<u32> },

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("swap pairs overlap on value {value}")]
    OverlappingSwap { value: u8 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("table {table}, line {line}: {problem}")]
    Table {
        table: String,
        line: usize,
        problem: TableProblem,
    },

    #[error("unknown name '{0}'")]
    UnknownName(String),

    #[error("extension needs pivot n+k-4 >= 1, got n={n}, k={k}")]
    NoPivot { n: usize, k: usize },

    #[error("ineligible base: {0}")]
    Ineligible(String),

    #[error("composition refused: {0}")]
    CompositionRefused(String),

    #[error("{pairs} pairs exceeds exhaustive ceiling {ceiling}; use a sampled or stratified strategy")]
    TooManyPairs { pairs: u128, ceiling: u128 },

    #[error("invalid job: {0}")]
    InvalidJob(String),

    #[error("domain of 3^{n} words is too large to materialize")]
    TooLarge { n: usize },

    #[error("code: {0}")]
    Code(String),

    #[error("bound: {0}")]
    Bound(String),

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// What went wrong while loading a mapping table.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableProblem {
    #[error("bad header: {0}")]
    Header(String),
    #[error("malformed row: {0}")]
    Malformed(String),
    #[error("duplicate domain word {0}")]
    DuplicateWord(String),
    #[error("output is not a permutation: {0}")]
    NotPermutation(String),
    #[error("output {output} already assigned to {first}")]
    DuplicateOutput { output: String, first: String },
    #[error("expected {expected} rows, found {found}")]
    MissingRows { expected: usize, found: usize },
}
