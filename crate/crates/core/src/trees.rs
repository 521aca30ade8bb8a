//! Labelled planar rooted trees and their Polish-notation encoding.
//!
//! Every leaf of a [`Tree`] is a free end; internal nodes carry a label whose
//! arity equals the number of children. Trees compare lexicographically by
//! their Polish words (derived `Ord` coincides with that order because Polish
//! words are prefix-free).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, ParseErrorKind, Result};

/// One label of an alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Label {
    pub symbol: char,
    pub arity: usize,
}

/// The label set, partitioned by arity, with exactly one arity-0 label: the
/// free end.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Label>", into = "Vec<Label>")]
pub struct Alphabet {
    labels: Vec<Label>,
    free_end: char,
}

impl Alphabet {
    pub fn new(mut labels: Vec<Label>) -> Result<Self> {
        labels.sort_by_key(|l| l.symbol);
        for w in labels.windows(2) {
            if w[0].symbol == w[1].symbol {
                return Err(Error::Alphabet(format!("label '{}' declared twice", w[0].symbol)));
            }
        }
        let leaves: Vec<_> = labels.iter().filter(|l| l.arity == 0).collect();
        let free_end = match leaves.as_slice() {
            [leaf] => leaf.symbol,
            [] => return Err(Error::Alphabet("no arity-0 label (free end)".into())),
            _ => return Err(Error::Alphabet("more than one arity-0 label; only the free end may have arity 0".into())),
        };
        for l in &labels {
            if l.symbol.is_whitespace() || l.symbol == ',' || l.symbol == ':' {
                return Err(Error::Alphabet(format!("reserved character {:?} used as label", l.symbol)));
            }
        }
        Ok(Alphabet { labels, free_end })
    }

    /// `{m: 2, x: 0}`.
    pub fn binary() -> Self {
        Self::new(vec![Label { symbol: 'm', arity: 2 }, Label { symbol: 'x', arity: 0 }])
            .expect("binary alphabet is valid")
    }

    /// Parses `name:arity` pairs separated by commas, e.g. `m:2,t:3,x:0`.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut labels = Vec::new();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, arity) =
                item.split_once(':').ok_or_else(|| Error::Alphabet(format!("expected name:arity, got {item:?}")))?;
            let mut chars = name.trim().chars();
            let symbol = match (chars.next(), chars.next()) {
                (Some(c), None) => c,
                _ => return Err(Error::Alphabet(format!("label name {name:?} must be a single character"))),
            };
            let arity = arity.trim().parse().map_err(|_| Error::Alphabet(format!("bad arity in {item:?}")))?;
            labels.push(Label { symbol, arity });
        }
        Self::new(labels)
    }

    pub fn free_end(&self) -> char {
        self.free_end
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Labels of positive arity, in symbol order.
    pub fn operations(&self) -> impl Iterator<Item = Label> + '_ {
        self.labels.iter().copied().filter(|l| l.arity > 0)
    }

    pub fn arity(&self, symbol: char) -> Option<usize> {
        self.labels.iter().find(|l| l.symbol == symbol).map(|l| l.arity)
    }

    pub fn max_arity(&self) -> usize {
        self.labels.iter().map(|l| l.arity).max().unwrap_or(0)
    }

    /// The bare free end over this alphabet.
    pub fn leaf(&self) -> Tree {
        Tree::leaf(self.free_end)
    }
}

impl TryFrom<Vec<Label>> for Alphabet {
    type Error = Error;

    fn try_from(labels: Vec<Label>) -> Result<Self> {
        Self::new(labels)
    }
}

impl From<Alphabet> for Vec<Label> {
    fn from(a: Alphabet) -> Self {
        a.labels
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.labels.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}:{}", l.symbol, l.arity)?;
        }
        Ok(())
    }
}

/// A planar rooted labelled tree.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tree {
    label: char,
    children: Vec<Tree>,
}

impl Tree {
    pub fn leaf(free_end: char) -> Self {
        Tree { label: free_end, children: Vec::new() }
    }

    /// Builds an internal node. Arity is not checked here; trees built through
    /// [`Tree::parse`] are always well-formed.
    pub fn node(label: char, children: Vec<Tree>) -> Self {
        Tree { label, children }
    }

    /// Parses a Polish word over `alphabet`.
    pub fn parse(word: &str, alphabet: &Alphabet) -> Result<Self, ParseError> {
        let symbols: Vec<char> = word.chars().collect();
        if symbols.is_empty() {
            return Err(ParseError { position: 0, kind: ParseErrorKind::Empty });
        }
        // Stack of (label, children so far, arity).
        let mut stack: Vec<(char, Vec<Tree>, usize)> = Vec::new();
        for (pos, &c) in symbols.iter().enumerate() {
            let arity =
                alphabet.arity(c).ok_or(ParseError { position: pos, kind: ParseErrorKind::UnknownSymbol(c) })?;
            if pos > 0 && stack.is_empty() {
                return Err(ParseError { position: pos, kind: ParseErrorKind::TrailingSymbols });
            }
            let mut done = if arity == 0 {
                Tree::leaf(c)
            } else {
                stack.push((c, Vec::with_capacity(arity), arity));
                continue;
            };
            loop {
                match stack.last_mut() {
                    None => {
                        if pos + 1 < symbols.len() {
                            return Err(ParseError { position: pos + 1, kind: ParseErrorKind::TrailingSymbols });
                        }
                        return Ok(done);
                    }
                    Some((_, children, arity)) => {
                        children.push(done);
                        if children.len() < *arity {
                            break;
                        }
                        let (label, children, _) = stack.pop().expect("non-empty");
                        done = Tree { label, children };
                    }
                }
            }
        }
        let missing = stack.iter().map(|(_, ch, a)| a - ch.len()).sum();
        Err(ParseError { position: symbols.len(), kind: ParseErrorKind::Truncated { missing } })
    }

    /// Preorder label sequence.
    pub fn polish(&self) -> String {
        let mut out = String::new();
        self.write_polish(&mut out);
        out
    }

    fn write_polish(&self, out: &mut String) {
        out.push(self.label);
        for c in &self.children {
            c.write_polish(out);
        }
    }

    pub fn label(&self) -> char {
        self.label
    }

    pub fn children(&self) -> &[Tree] {
        &self.children
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn height(&self) -> usize {
        if self.is_leaf() {
            0
        } else {
            1 + self.children.iter().map(Tree::height).max().unwrap_or(0)
        }
    }

    pub fn vertex_count(&self) -> usize {
        1 + self.children.iter().map(Tree::vertex_count).sum::<usize>()
    }

    pub fn leaf_count(&self) -> usize {
        if self.is_leaf() {
            1
        } else {
            self.children.iter().map(Tree::leaf_count).sum()
        }
    }

    pub fn internal_count(&self) -> usize {
        if self.is_leaf() {
            0
        } else {
            1 + self.children.iter().map(Tree::internal_count).sum::<usize>()
        }
    }

    /// Replaces the `leaf_index`-th free end (left to right) with `scion`.
    pub fn graft(&self, leaf_index: usize, scion: &Tree) -> Result<Tree> {
        let leaves = self.leaf_count();
        if leaf_index >= leaves {
            return Err(Error::LeafIndex { index: leaf_index, leaves });
        }
        let mut out = self.clone();
        let mut remaining = leaf_index;
        out.graft_in_place(&mut remaining, scion);
        Ok(out)
    }

    fn graft_in_place(&mut self, remaining: &mut usize, scion: &Tree) -> bool {
        if self.is_leaf() {
            if *remaining == 0 {
                *self = scion.clone();
                return true;
            }
            *remaining -= 1;
            return false;
        }
        self.children.iter_mut().any(|c| c.graft_in_place(remaining, scion))
    }

    /// `self ⊴ other`: `other` is obtained from `self` by grafting trees onto
    /// free ends of `self`.
    pub fn is_rooted_subtree_of(&self, other: &Tree) -> bool {
        if self.is_leaf() {
            return true;
        }
        self.label == other.label
            && self.children.len() == other.children.len()
            && self.children.iter().zip(&other.children).all(|(a, b)| a.is_rooted_subtree_of(b))
    }

    /// Number of vertices `u` (root included) such that `pattern` is a rooted
    /// subtree of the subtree hanging at `u`.
    pub fn count_occurrences(&self, pattern: &Tree) -> usize {
        let here = usize::from(pattern.is_rooted_subtree_of(self));
        here + self.children.iter().map(|c| c.count_occurrences(pattern)).sum::<usize>()
    }

    /// True if some pattern embeds at some vertex.
    pub fn contains_any(&self, patterns: &[Tree]) -> bool {
        patterns.iter().any(|p| p.is_rooted_subtree_of(self)) || self.children.iter().any(|c| c.contains_any(patterns))
    }

    pub fn avoids(&self, patterns: &PatternSet) -> bool {
        !self.contains_any(patterns.patterns())
    }

    /// Keeps internal nodes whose root path has fewer than `depth` internal
    /// nodes above them; deeper subtrees become free ends. The result has
    /// height at most `depth` and is a rooted subtree of `self`.
    pub fn truncate(&self, depth: usize) -> Tree {
        if self.is_leaf() {
            return self.clone();
        }
        if depth == 0 {
            return Tree::leaf(self.free_end_label());
        }
        Tree { label: self.label, children: self.children.iter().map(|c| c.truncate(depth - 1)).collect() }
    }

    fn free_end_label(&self) -> char {
        let mut t = self;
        while let Some(c) = t.children.first() {
            t = c;
        }
        t.label
    }

    /// Reverses the child order at every node.
    pub fn mirror(&self) -> Tree {
        Tree { label: self.label, children: self.children.iter().rev().map(Tree::mirror).collect() }
    }

    /// All subtrees hanging at vertices, in preorder (with repetitions).
    pub fn subtrees(&self) -> Vec<&Tree> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            out.push(t);
            stack.extend(t.children.iter().rev());
        }
        out
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.polish())
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tree({})", self.polish())
    }
}

/// A finite set of patterns over a shared alphabet, with its maximal height.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSet {
    alphabet: Alphabet,
    patterns: Vec<Tree>,
    max_height: usize,
}

impl PatternSet {
    /// The bare free end is accepted as a pattern; see [`PatternSet::is_degenerate`].
    pub fn new(alphabet: Alphabet, mut patterns: Vec<Tree>) -> Result<Self> {
        for p in &patterns {
            check_over(p, &alphabet)?;
        }
        patterns.sort();
        patterns.dedup();
        let max_height = patterns.iter().map(Tree::height).max().unwrap_or(0);
        Ok(PatternSet { alphabet, patterns, max_height })
    }

    pub fn empty(alphabet: Alphabet) -> Self {
        PatternSet { alphabet, patterns: Vec::new(), max_height: 0 }
    }

    pub fn single(alphabet: Alphabet, pattern: Tree) -> Result<Self> {
        Self::new(alphabet, vec![pattern])
    }

    /// Parses comma- or whitespace-separated Polish words.
    pub fn parse(alphabet: Alphabet, words: &str) -> Result<Self> {
        let patterns = words
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|w| !w.is_empty())
            .map(|w| Tree::parse(w, &alphabet))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(alphabet, patterns)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn patterns(&self) -> &[Tree] {
        &self.patterns
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// `d`: the maximal pattern height, 0 for the empty set.
    pub fn max_height(&self) -> usize {
        self.max_height
    }

    /// A set containing the bare free end: every tree contains it, so the
    /// avoidance language is empty.
    pub fn is_degenerate(&self) -> bool {
        self.patterns.iter().any(Tree::is_leaf)
    }
}

fn check_over(tree: &Tree, alphabet: &Alphabet) -> Result<()> {
    match alphabet.arity(tree.label) {
        Some(a) if a == tree.children.len() => tree.children.iter().try_for_each(|c| check_over(c, alphabet)),
        Some(a) => Err(Error::Invalid(format!(
            "label '{}' has arity {a} but {} children in {}",
            tree.label,
            tree.children.len(),
            tree
        ))),
        None => Err(Error::Invalid(format!("label '{}' of {} is not in the alphabet", tree.label, tree))),
    }
}

/// All planar binary trees over `{m, x}` with `n_leaves` leaves, sorted by
/// Polish word. There are `Catalan(n_leaves - 1)` of them.
pub fn enumerate_binary_patterns(n_leaves: usize) -> Vec<Tree> {
    assert!(n_leaves >= 1, "a binary tree has at least one leaf");
    let mut by_leaves: Vec<Vec<Tree>> = vec![Vec::new(), vec![Tree::leaf('x')]];
    for n in 2..=n_leaves {
        let mut layer = Vec::new();
        for left in 1..n {
            for l in &by_leaves[left] {
                for r in &by_leaves[n - left] {
                    layer.push(Tree::node('m', vec![l.clone(), r.clone()]));
                }
            }
        }
        layer.sort();
        by_leaves.push(layer);
    }
    by_leaves.swap_remove(n_leaves)
}
