//! Fixed inputs for the benchmarks.

use treewilf_core::{Alphabet, PatternSet, Tree};

/// Patterns of increasing automaton size.
pub const PATTERNS: [&str; 4] = ["mmxxx", "mmxxmxx", "mmxmxxmxx", "mmmxmmxmxxxxmxx"];

pub fn tree(word: &str) -> Tree {
    Tree::parse(word, &Alphabet::binary()).expect("benchmark patterns parse")
}

pub fn single(word: &str) -> PatternSet {
    PatternSet::single(Alphabet::binary(), tree(word)).expect("binary pattern")
}
