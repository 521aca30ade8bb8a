//! Bottom-up pattern-matching automaton and the compact systems built on it.
//!
//! The state of a tree `T` is the set of subtrees `p` of the patterns with
//! `p ⊴ T`. It is computed from the children's states alone:
//! `p = m(p1, ..., pk)` matches `m(T1, ..., Tk)` iff every `pi` matches `Ti`.
//! A pattern occurs at the root of `T` iff it belongs to the state, so the
//! number of root occurrences is a function of the state. Reachable states
//! are then merged by partition refinement, which keeps systems small even
//! for tall patterns.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::systems::{for_each_tuple, AlgebraicSystem, Monomial};
use crate::trees::{Alphabet, PatternSet, Tree};

type StateSet = u128;

#[derive(Debug, Clone)]
pub struct MatchAutomaton {
    alphabet: Alphabet,
    subpatterns: Vec<Tree>,
    /// Indices in `subpatterns` of the patterns themselves.
    full: Vec<usize>,
    states: Vec<StateSet>,
    /// Smallest tree reaching each state, found breadth-first.
    witnesses: Vec<Tree>,
    leaf_state: usize,
    transitions: HashMap<(char, Vec<usize>), usize>,
}

impl MatchAutomaton {
    pub fn new(patterns: &PatternSet) -> Result<Self> {
        let alphabet = patterns.alphabet().clone();
        let mut subpatterns: Vec<Tree> = patterns.patterns().iter().flat_map(|p| p.subtrees()).cloned().collect();
        subpatterns.push(alphabet.leaf());
        subpatterns.sort();
        subpatterns.dedup();
        if subpatterns.len() > StateSet::BITS as usize {
            return Err(Error::Bound(format!(
                "{} distinct pattern subtrees (limit {})",
                subpatterns.len(),
                StateSet::BITS
            )));
        }
        let pos = |t: &Tree| subpatterns.binary_search(t).expect("subtree is indexed");
        let shapes: Vec<Option<(char, Vec<usize>)>> = subpatterns
            .iter()
            .map(|t| (!t.is_leaf()).then(|| (t.label(), t.children().iter().map(pos).collect())))
            .collect();
        let full = patterns.patterns().iter().map(pos).collect();
        let leaf_bit: StateSet = 1 << pos(&alphabet.leaf());

        let step = |label: char, children: &[StateSet]| -> StateSet {
            let mut s = leaf_bit;
            for (i, shape) in shapes.iter().enumerate() {
                if let Some((l, kids)) = shape {
                    if *l == label && kids.iter().zip(children).all(|(&k, &c)| c >> k & 1 == 1) {
                        s |= 1 << i;
                    }
                }
            }
            s
        };

        let mut states = vec![leaf_bit];
        let mut witnesses = vec![alphabet.leaf()];
        let mut index: HashMap<StateSet, usize> = HashMap::from([(leaf_bit, 0)]);
        let mut transitions = HashMap::new();
        let ops: Vec<_> = alphabet.operations().collect();
        // Re-scan all tuples until no new state appears; tuples already
        // resolved are skipped.
        loop {
            let known = states.len();
            for op in &ops {
                for_each_tuple(known, op.arity, |tuple| {
                    let key = (op.symbol, tuple.to_vec());
                    if transitions.contains_key(&key) {
                        return;
                    }
                    let kids: Vec<StateSet> = tuple.iter().map(|&i| states[i]).collect();
                    let s = step(op.symbol, &kids);
                    let id = *index.entry(s).or_insert_with(|| {
                        states.push(s);
                        witnesses.push(Tree::node(op.symbol, tuple.iter().map(|&i| witnesses[i].clone()).collect()));
                        states.len() - 1
                    });
                    transitions.insert(key, id);
                });
            }
            if states.len() == known {
                break;
            }
        }
        Ok(MatchAutomaton { alphabet, subpatterns, full, states, witnesses, leaf_state: 0, transitions })
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    /// Number of patterns occurring at the root of any tree in state `s`.
    pub fn marks(&self, s: usize) -> u32 {
        self.full.iter().filter(|&&i| self.states[s] >> i & 1 == 1).count() as u32
    }

    pub fn witness(&self, s: usize) -> &Tree {
        &self.witnesses[s]
    }

    /// The subpatterns matched in state `s`.
    pub fn matched(&self, s: usize) -> Vec<&Tree> {
        (0..self.subpatterns.len()).filter(|&i| self.states[s] >> i & 1 == 1).map(|i| &self.subpatterns[i]).collect()
    }

    /// Runs the automaton on a tree.
    pub fn state_of(&self, tree: &Tree) -> usize {
        if tree.is_leaf() {
            return self.leaf_state;
        }
        let kids: Vec<usize> = tree.children().iter().map(|c| self.state_of(c)).collect();
        self.transitions[&(tree.label(), kids)]
    }

    /// Coarsest partition of the kept states that is compatible with the
    /// transitions and with `marks`. Returns the block of each kept state
    /// (`None` for dropped states) and the number of blocks.
    fn minimise(&self, keep: &[bool]) -> (Vec<Option<usize>>, usize) {
        let n = self.states.len();
        let kept: Vec<usize> = (0..n).filter(|&s| keep[s]).collect();
        let mut block: Vec<Option<usize>> = vec![None; n];
        let mut count = renumber(&kept, &mut block, |s| vec![self.marks(s) as usize]);
        let ops: Vec<_> = self.alphabet.operations().collect();
        loop {
            let snapshot = block.clone();
            let signature = |s: usize| -> Vec<usize> {
                let mut sig = vec![snapshot[s].expect("kept")];
                for op in &ops {
                    for position in 0..op.arity {
                        for_each_tuple(kept.len(), op.arity - 1, |ctx| {
                            let mut tuple: Vec<usize> = ctx.iter().map(|&i| kept[i]).collect();
                            tuple.insert(position, s);
                            let next = self.transitions[&(op.symbol, tuple)];
                            sig.push(snapshot[next].map_or(usize::MAX, |b| b));
                        });
                    }
                }
                sig
            };
            let refined = renumber(&kept, &mut block, signature);
            if refined == count {
                return (block, count);
            }
            count = refined;
        }
    }

    /// Vertex-weighted system over the minimised automaton. With
    /// `mark_occurrences` the second variable `y` counts pattern
    /// occurrences; otherwise states holding a pattern are dropped and the
    /// target is the avoidance series.
    pub fn system(&self, mark_occurrences: bool) -> AlgebraicSystem {
        let keep: Vec<bool> = (0..self.states.len()).map(|s| mark_occurrences || self.marks(s) == 0).collect();
        let (block, count) = self.minimise(&keep);
        // Order blocks by their smallest witness.
        let mut reps: Vec<Option<usize>> = vec![None; count];
        for (s, b) in block.iter().enumerate() {
            if let Some(b) = *b {
                let better = match reps[b] {
                    None => true,
                    Some(r) => witness_key(&self.witnesses[s]) < witness_key(&self.witnesses[r]),
                };
                if better {
                    reps[b] = Some(s);
                }
            }
        }
        let reps: Vec<usize> = reps.into_iter().map(|r| r.expect("nonempty block")).collect();
        let mut order: Vec<usize> = (0..count).collect();
        order.sort_by(|&a, &b| witness_key(&self.witnesses[reps[a]]).cmp(&witness_key(&self.witnesses[reps[b]])));
        let mut rank = vec![0; count];
        for (r, &b) in order.iter().enumerate() {
            rank[b] = r;
        }
        let unknown_of = |s: usize| block[s].map(|b| rank[b]);

        let mut equations = vec![Vec::new(); count];
        if let Some(u) = unknown_of(self.leaf_state) {
            equations[u].push(Monomial::new(1, 1, 0, vec![]));
        }
        let class_reps: Vec<usize> = order.iter().map(|&b| reps[b]).collect();
        for op in self.alphabet.operations() {
            for_each_tuple(count, op.arity, |tuple| {
                let states: Vec<usize> = tuple.iter().map(|&u| class_reps[u]).collect();
                let next = self.transitions[&(op.symbol, states)];
                if let Some(head) = unknown_of(next) {
                    let y = if mark_occurrences { self.marks(next) } else { 0 };
                    equations[head].push(Monomial::new(1, 1, y, tuple.to_vec()));
                }
            });
        }
        let unknowns = class_reps.iter().map(|&s| format!("F[{}]", self.witnesses[s])).collect();
        let vars = if mark_occurrences { vec!["x".into(), "y".into()] } else { vec!["x".into()] };
        let target = (0..count).map(|u| (u, 1)).collect();
        AlgebraicSystem::new(vars, unknowns, equations, target).expect("automaton system is well-formed")
    }
}

fn witness_key(t: &Tree) -> (usize, String) {
    (t.vertex_count(), t.polish())
}

/// Assigns dense block numbers to `kept` states by signature; returns the
/// number of blocks.
fn renumber(kept: &[usize], block: &mut [Option<usize>], signature: impl Fn(usize) -> Vec<usize>) -> usize {
    let sigs: Vec<Vec<usize>> = kept.iter().map(|&s| signature(s)).collect();
    let mut ids: BTreeMap<&Vec<usize>, usize> = BTreeMap::new();
    for sig in &sigs {
        let next = ids.len();
        ids.entry(sig).or_insert(next);
    }
    for (&s, sig) in kept.iter().zip(&sigs) {
        block[s] = Some(ids[sig]);
    }
    ids.len()
}

/// Compact `En_t(x, y)` system for a single binary pattern.
pub fn compact_enumeration_system(pattern: &Tree) -> Result<AlgebraicSystem> {
    if pattern.is_leaf() {
        return Err(Error::Degenerate(
            "the bare free end occurs at every vertex; its enumeration is the vertex count".into(),
        ));
    }
    let set = PatternSet::single(Alphabet::binary(), pattern.clone())?;
    Ok(MatchAutomaton::new(&set)?.system(true))
}

/// Compact vertex-weighted avoidance system for any pattern set.
pub fn avoidance_system(patterns: &PatternSet) -> Result<AlgebraicSystem> {
    Ok(MatchAutomaton::new(patterns)?.system(false))
}
