use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A malformed Polish word, with the zero-based symbol position at fault.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnknownSymbol(char),
    /// The word ended while subtrees were still open.
    Truncated {
        missing: usize,
    },
    /// Symbols remain after the tree closed.
    TrailingSymbols,
    Empty,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::UnknownSymbol(c) => {
                write!(f, "unknown symbol '{c}' at position {}", self.position)
            }
            ParseErrorKind::Truncated { missing } => {
                write!(f, "word ends at position {} with {missing} subtree(s) still open", self.position)
            }
            ParseErrorKind::TrailingSymbols => {
                write!(f, "tree is already complete at position {}", self.position)
            }
            ParseErrorKind::Empty => write!(f, "empty word"),
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("invalid alphabet: {0}")]
    Alphabet(String),
    #[error("leaf index {index} out of range: tree has {leaves} free end(s)")]
    LeafIndex { index: usize, leaves: usize },
    #[error("degenerate pattern: {0}")]
    Degenerate(String),
    #[error("system is not proper: {0}")]
    NotProper(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("series has a nonzero coefficient at even order {0}")]
    Parity(usize),
    #[error("resource bound exceeded: {0}")]
    Bound(String),
    #[error("elimination failed: {0}")]
    Elimination(String),
    #[error("deadline exceeded")]
    Deadline,
    #[error("division by the zero polynomial")]
    DivisionByZero,
}
