//! Enumeration of labelled planar trees avoiding forbidden patterns.
//!
//! The pipeline runs from patterns to numbers:
//!
//! * [`trees`] holds the tree model, Polish-word encoding and the rooted
//!   subtree relation.
//! * [`grammar`] builds the unambiguous context-free grammar whose language is
//!   the set of avoiding trees.
//! * [`systems`] turns grammars (or pattern-matching automata) into fixed-point
//!   polynomial systems.
//! * [`series`] solves those systems as exact truncated power series.
//! * [`elim`] eliminates unknowns by resultants and checks divisibility and
//!   annihilation of series.
//! * [`wilf`] sweeps all binary patterns of a size and groups them into Wilf
//!   and enumeration classes.
//! * [`oracle`] is the brute-force ground truth everything above is checked
//!   against.

pub mod elim;
pub mod error;
pub mod grammar;
pub mod oracle;
pub mod series;
pub mod systems;
pub mod trees;
pub mod wilf;

pub use elim::{annihilates, eliminate, poly_divides, BivarPoly, EliminationOptions};
pub use error::{Error, ParseError, Result};
pub use grammar::Grammar;
pub use oracle::OccurrenceHistogram;
pub use series::{av_series, en_series, solve_truncated, to_operad_series, BiSeries, Series, TruncatedSeries};
pub use systems::AlgebraicSystem;
pub use trees::{enumerate_binary_patterns, Alphabet, PatternSet, Tree};
pub use wilf::{classify, ClassificationReport, ClassifyOptions, Mode};

/// Truncation order used when none is given.
pub const DEFAULT_ORDER: usize = 257;
