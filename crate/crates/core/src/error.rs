use alloc::string::String;

/// Errors raised by the matrix, shift, band and equivalence layers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    Dimension {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("entry count {found} does not match {rows}x{cols}")]
    EntryCount {
        rows: usize,
        cols: usize,
        found: usize,
    },

    #[error("non-finite matrix entry")]
    NonFinite,

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("ill-conditioned matrix{}: sigma_min/sigma_max = {ratio:e}", fmt_index(.index))]
    IllConditioned { ratio: f64, index: Option<i64> },

    #[error("precondition violated: {what} (residual {residual:e})")]
    Precondition { what: String, residual: f64 },

    #[error("matrix at index {index} is not normal (residual {residual:e})")]
    NotNormal { index: usize, residual: f64 },

    #[error("matrices {first} and {second} do not commute (residual {residual:e})")]
    NotCommuting {
        first: usize,
        second: usize,
        residual: f64,
    },

    #[error("expected rank {expected}, found rank {found}")]
    Rank { expected: usize, found: usize },

    #[error("decomposition failed at index {index} (residual {residual:e})")]
    Decomposition { index: usize, residual: f64 },

    #[error("index {index} outside window [{lo}, {hi}]")]
    OutOfWindow { index: i64, lo: i64, hi: i64 },

    #[error("unexpected band pattern: {0}")]
    BandPattern(String),

    #[error("weight at index {index} is zero")]
    ZeroWeight { index: i64 },

    #[error("Gram condition violated at index {index}: entry not unitary (residual {residual:e})")]
    GramViolation { index: i64, residual: f64 },
}

fn fmt_index(index: &Option<i64>) -> String {
    match index {
        Some(n) => alloc::format!(" at index {n}"),
        None => String::new(),
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
