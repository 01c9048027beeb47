use thiserror::Error;

/// Errors produced by diagram construction, parsing, and rewriting.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rank must be at least 1, got {0}")]
    InvalidRank(usize),

    #[error("rank must be at least 3 for generator words, got {0}")]
    RankTooSmall(usize),

    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),

    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),

    #[error("invalid generator index: {0}")]
    InvalidIndex(String),

    #[error("invalid canonical word: {0}")]
    InvalidCanonical(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("rewrite fuel exhausted after {0} steps")]
    FuelExhausted(usize),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
