//! A brute-force model of labelled planar trees written without the crate's
//! tree code, used as ground truth by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Node {
    pub label: char,
    pub kids: Vec<Node>,
}

impl Node {
    pub fn word(&self) -> String {
        let mut s = String::new();
        self.write(&mut s);
        s
    }

    fn write(&self, s: &mut String) {
        s.push(self.label);
        for k in &self.kids {
            k.write(s);
        }
    }

    pub fn vertices(&self) -> usize {
        1 + self.kids.iter().map(Node::vertices).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        self.kids.iter().map(|k| k.height() + 1).max().unwrap_or(0)
    }

    /// `self` matches `t` at the root when `self`'s leaves may absorb whole subtrees.
    pub fn matches_at_root(&self, t: &Node, leaf: char) -> bool {
        if self.kids.is_empty() && self.label == leaf {
            return true;
        }
        self.label == t.label
            && self.kids.len() == t.kids.len()
            && self.kids.iter().zip(&t.kids).all(|(a, b)| a.matches_at_root(b, leaf))
    }

    pub fn occurrences(&self, pattern: &Node, leaf: char) -> usize {
        usize::from(pattern.matches_at_root(self, leaf))
            + self.kids.iter().map(|k| k.occurrences(pattern, leaf)).sum::<usize>()
    }

    pub fn avoids(&self, patterns: &[Node], leaf: char) -> bool {
        patterns.iter().all(|p| self.occurrences(p, leaf) == 0)
    }

    pub fn mirror(&self) -> Node {
        Node { label: self.label, kids: self.kids.iter().rev().map(Node::mirror).collect() }
    }
}

/// Reads a Polish word, `None` unless it is exactly one tree.
pub fn read(word: &str, arity: &BTreeMap<char, usize>) -> Option<Node> {
    fn go(chars: &[char], pos: &mut usize, arity: &BTreeMap<char, usize>) -> Option<Node> {
        let c = *chars.get(*pos)?;
        let k = *arity.get(&c)?;
        *pos += 1;
        let kids = (0..k).map(|_| go(chars, pos, arity)).collect::<Option<Vec<_>>>()?;
        Some(Node { label: c, kids })
    }
    let chars: Vec<char> = word.chars().collect();
    let mut pos = 0;
    let t = go(&chars, &mut pos, arity)?;
    (pos == chars.len()).then_some(t)
}

pub fn binary_arity() -> BTreeMap<char, usize> {
    BTreeMap::from([('m', 2), ('x', 0)])
}

pub fn mixed_arity() -> BTreeMap<char, usize> {
    BTreeMap::from([('m', 2), ('t', 3), ('x', 0)])
}

/// `out[v]` holds every tree with exactly `v` vertices, for `v <= max_vertices`.
pub fn trees_by_vertices(max_vertices: usize, arity: &BTreeMap<char, usize>) -> Vec<Vec<Node>> {
    let mut out: Vec<Vec<Node>> = vec![Vec::new(); max_vertices + 1];
    for v in 1..=max_vertices {
        let mut layer = Vec::new();
        for (&label, &a) in arity {
            if a == 0 {
                if v == 1 {
                    layer.push(Node { label, kids: Vec::new() });
                }
                continue;
            }
            // Children share v - 1 vertices, at least one each.
            let mut partial: Vec<(usize, Vec<Node>)> = vec![(0, Vec::new())];
            for _ in 0..a {
                let mut next = Vec::new();
                for (used, kids) in &partial {
                    for (size, trees) in out.iter().enumerate().take(v - used).skip(1) {
                        for t in trees {
                            let mut k = kids.clone();
                            k.push(t.clone());
                            next.push((used + size, k));
                        }
                    }
                }
                partial = next;
            }
            layer.extend(partial.into_iter().filter(|(u, _)| *u == v - 1).map(|(_, kids)| Node { label, kids }));
        }
        out[v] = layer;
    }
    out
}

pub fn trees_up_to_vertices(max_vertices: usize, arity: &BTreeMap<char, usize>) -> Vec<Node> {
    trees_by_vertices(max_vertices, arity).into_iter().flatten().collect()
}

/// Binary trees with `leaves` leaves.
pub fn binary_patterns(leaves: usize) -> Vec<Node> {
    trees_by_vertices(2 * leaves - 1, &binary_arity()).pop().unwrap_or_default()
}

pub fn catalan(n: usize) -> u64 {
    (0..n as u64).fold(1, |c, i| c * 2 * (2 * i + 1) / (i + 2))
}
