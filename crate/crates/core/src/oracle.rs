//! Exhaustive enumeration: the ground truth for every symbolic computation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::trees::{Alphabet, PatternSet, Tree};

/// Oracle bound used by the verification suites for the binary alphabet.
pub const DEFAULT_MAX_INTERNAL: usize = 9;

/// All trees with exactly `k` internal nodes, for `k = 0..=max_internal`.
///
/// Layer `k` is sorted by Polish word.
pub fn trees_by_internal_count(alphabet: &Alphabet, max_internal: usize) -> Vec<Vec<Tree>> {
    let ops: Vec<_> = alphabet.operations().collect();
    let mut layers: Vec<Vec<Tree>> = vec![vec![alphabet.leaf()]];
    for k in 1..=max_internal {
        let mut layer = Vec::new();
        for op in &ops {
            // Distribute the remaining k - 1 internal nodes over the children.
            for split in compositions(k - 1, op.arity) {
                let mut partial: Vec<Vec<Tree>> = vec![Vec::new()];
                for &part in &split {
                    let mut next = Vec::with_capacity(partial.len() * layers[part].len());
                    for prefix in &partial {
                        for child in &layers[part] {
                            let mut v = prefix.clone();
                            v.push(child.clone());
                            next.push(v);
                        }
                    }
                    partial = next;
                }
                layer.extend(partial.into_iter().map(|children| Tree::node(op.symbol, children)));
            }
        }
        layer.sort();
        layers.push(layer);
    }
    layers
}

/// Weak compositions of `total` into `parts` nonnegative parts.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Every tree with at most `max_internal` internal nodes, each exactly once:
/// by internal-node count, then by Polish word.
pub fn enumerate_trees(alphabet: &Alphabet, max_internal: usize) -> impl Iterator<Item = Tree> {
    trees_by_internal_count(alphabet, max_internal).into_iter().flatten()
}

/// `a_{n,k}`: number of trees with `n` vertices and exactly `k` occurrences.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccurrenceHistogram {
    pub entries: BTreeMap<(usize, usize), u64>,
}

impl OccurrenceHistogram {
    pub fn get(&self, n: usize, k: usize) -> u64 {
        self.entries.get(&(n, k)).copied().unwrap_or(0)
    }

    /// Sum over `k` at each vertex count.
    pub fn totals(&self) -> BTreeMap<usize, u64> {
        let mut out = BTreeMap::new();
        for (&(n, _), &c) in &self.entries {
            *out.entry(n).or_insert(0) += c;
        }
        out
    }

    /// The `k = 0` slice at every vertex count present.
    pub fn avoiders(&self) -> BTreeMap<usize, u64> {
        self.totals().keys().map(|&n| (n, self.get(n, 0))).collect()
    }

    pub fn merge(&mut self, other: &OccurrenceHistogram) {
        for (&key, &c) in &other.entries {
            *self.entries.entry(key).or_insert(0) += c;
        }
    }
}

pub fn brute_histogram(alphabet: &Alphabet, pattern: &Tree, max_internal: usize) -> OccurrenceHistogram {
    let mut hist = OccurrenceHistogram::default();
    for t in enumerate_trees(alphabet, max_internal) {
        *hist.entries.entry((t.vertex_count(), t.count_occurrences(pattern))).or_insert(0) += 1;
    }
    hist
}

/// Number of avoiders at each vertex count realised by some enumerated tree
/// (zero counts included).
pub fn count_avoiders(alphabet: &Alphabet, patterns: &PatternSet, max_internal: usize) -> BTreeMap<usize, u64> {
    let mut out = BTreeMap::new();
    for t in enumerate_trees(alphabet, max_internal) {
        let c = out.entry(t.vertex_count()).or_insert(0);
        if t.avoids(patterns) {
            *c += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;

    fn b(word: &str) -> Tree {
        Tree::parse(word, &Alphabet::binary()).unwrap()
    }

    #[test]
    fn enumeration_sizes() {
        let a = Alphabet::binary();
        assert_eq!(enumerate_trees(&a, 0).collect::<Vec<_>>(), vec![Tree::leaf('x')]);
        assert_eq!(enumerate_trees(&a, 2).count(), 4);
        assert_eq!(enumerate_trees(&a, 4).count(), 23);
        let layers = trees_by_internal_count(&a, DEFAULT_MAX_INTERNAL);
        assert_eq!(layers[9].len(), 4862);
    }

    #[test]
    fn no_duplicates() {
        let a = Alphabet::parse("m:2,t:3,x:0").unwrap();
        let all: Vec<String> = enumerate_trees(&a, 5).map(|t| t.polish()).collect();
        let set: HashSet<&String> = all.iter().collect();
        assert_eq!(set.len(), all.len());
    }

    /// Fuss–Catalan style recurrence, computed independently of the
    /// enumerator: T(k) = sum over labels of sum over child splits of the
    /// product of T(k_i).
    fn counts_by_dp(arities: &[usize], max_internal: usize) -> Vec<u64> {
        let mut t = vec![1u64];
        for k in 1..=max_internal {
            let mut total = 0;
            for &a in arities {
                // ways[j] = number of a'-tuples of trees with j internal nodes total
                let mut ways = vec![0u64; k];
                ways[0] = 1;
                for _ in 0..a {
                    let mut next = vec![0u64; k];
                    for (j, &w) in ways.iter().enumerate() {
                        for (i, &ti) in t.iter().enumerate() {
                            if j + i < k {
                                next[j + i] += w * ti;
                            }
                        }
                    }
                    ways = next;
                }
                total += ways[k - 1];
            }
            t.push(total);
        }
        t
    }

    #[test]
    fn layer_sizes_match_recurrence() {
        for (spec, arities, max) in
            [("m:2,x:0", vec![2], 9), ("m:2,t:3,x:0", vec![2, 3], 5), ("u:1,m:2,x:0", vec![1, 2], 6)]
        {
            let a = Alphabet::parse(spec).unwrap();
            let layers = trees_by_internal_count(&a, max);
            let sizes: Vec<u64> = layers.iter().map(|l| l.len() as u64).collect();
            assert_eq!(sizes, counts_by_dp(&arities, max), "{spec}");
        }
    }

    #[test]
    fn histogram_examples() {
        let a = Alphabet::binary();
        let h = brute_histogram(&a, &b("mxx"), 2);
        assert_eq!(h.get(5, 2), 2);
        let h = brute_histogram(&a, &b("mmxxx"), 2);
        assert_eq!(h.get(5, 0), 1);
        assert_eq!(h.get(5, 1), 1);
        let h = brute_histogram(&a, &b("mmxxx"), 0);
        assert_eq!(h.entries, BTreeMap::from([((1, 0), 1)]));
    }

    #[test]
    fn histogram_invariants() {
        let a = Alphabet::binary();
        let layers = trees_by_internal_count(&a, 6);
        for pattern in crate::trees::enumerate_binary_patterns(4) {
            let h = brute_histogram(&a, &pattern, 6);
            assert!(h.entries.keys().all(|(n, _)| n % 2 == 1));
            for (n, total) in h.totals() {
                assert_eq!(total as usize, layers[(n - 1) / 2].len());
            }
            let set = PatternSet::single(a.clone(), pattern.clone()).unwrap();
            assert_eq!(h.avoiders(), count_avoiders(&a, &set, 6));
        }
    }

    #[test]
    fn avoider_examples() {
        let a = Alphabet::binary();
        let assoc = PatternSet::parse(a.clone(), "mmxxx").unwrap();
        let counts: Vec<u64> = count_avoiders(&a, &assoc, 5).into_values().collect();
        assert_eq!(counts, [1, 1, 1, 1, 1, 1]);
        let free: Vec<u64> = count_avoiders(&a, &PatternSet::empty(a.clone()), 4).into_values().collect();
        assert_eq!(free, [1, 1, 2, 5, 14]);
        let all = PatternSet::parse(a.clone(), "mxx").unwrap();
        let counts: Vec<u64> = count_avoiders(&a, &all, 3).into_values().collect();
        assert_eq!(counts, [1, 0, 0, 0]);
    }

    #[test]
    fn occurrences_of_free_end_count_vertices() {
        let a = Alphabet::binary();
        for t in enumerate_trees(&a, 5) {
            assert_eq!(t.count_occurrences(&Tree::leaf('x')), t.vertex_count());
        }
    }
}
