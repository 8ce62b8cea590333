use thiserror::Error;

/// Errors raised by distribution construction and the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probability vector is empty")]
    Empty,
    #[error("entry {index} is not a finite nonnegative probability: {value}")]
    InvalidEntry { index: usize, value: f64 },
    #[error("probabilities sum to {sum}, expected 1 (pass a normalize flag to rescale)")]
    BadSum { sum: f64 },
    #[error("{labels} labels supplied for {probs} probabilities")]
    LabelMismatch { labels: usize, probs: usize },
    #[error("sequence is not sorted in nonincreasing order at index {index}")]
    NotSorted { index: usize },
    #[error("row {row} has {found} entries, expected {expected}")]
    Ragged {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("layer index must be at least 1")]
    ZeroIndex,
    #[error("order must be a nonnegative number or infinity, got {0}")]
    InvalidOrder(f64),
    #[error("eta must be positive and finite, got {0}")]
    InvalidEta(f64),
    #[error(
        "{rows}x{cols} alphabet is too large for exhaustive search (limit {max_rows}x{max_cols})"
    )]
    SearchTooLarge {
        rows: usize,
        cols: usize,
        max_rows: usize,
        max_cols: usize,
    },
    #[error("tie permutation search would visit {0} labelings")]
    TieSearchTooLarge(u128),
    #[error("geometric parameter must lie in (0, 1], got {0}")]
    InvalidRho(f64),
    #[error("tail tolerance must be positive, got {0}")]
    InvalidTailTol(f64),
    #[error("tail bound still above tolerance after {0} terms")]
    TruncationLimit(u64),
    #[error("mutual information must be nonnegative, got {0}")]
    InvalidInformation(f64),
    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("malformed loss pattern: {0}")]
    LossPattern(String),
    #[error("frame stream: {0}")]
    Stream(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse {
        line: usize,
        column: usize,
        msg: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
