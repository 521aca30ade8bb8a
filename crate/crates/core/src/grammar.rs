//! The unambiguous context-free grammar of a tree avoidance language.
//!
//! Nonterminals are the start symbol `S` and one `T[v]` per tree `v` of height
//! at most `d` (the maximal pattern height) that avoids the patterns. A word
//! derived from `T[v]` is an avoiding tree whose height-`d` truncation is `v`.
//! Rules come in three shapes:
//!
//! ```text
//! S    -> T[v]                      for every v in L_d
//! T[x] -> x
//! T[v] -> m T[v1] ... T[vk]         iff m(v1, ..., vk) avoids and truncates to v
//! ```

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;

use crate::trees::{Alphabet, PatternSet, Tree};

/// `L_d`: all avoiding trees of height at most `d`, sorted by Polish word.
pub fn build_ld(patterns: &PatternSet) -> Vec<Tree> {
    avoiders_up_to_height(patterns, patterns.max_height())
}

/// Avoiding trees of height at most `height`, sorted by Polish word.
pub fn avoiders_up_to_height(patterns: &PatternSet, height: usize) -> Vec<Tree> {
    let alphabet = patterns.alphabet();
    let leaf = alphabet.leaf();
    if !leaf.avoids(patterns) {
        return Vec::new();
    }
    let mut current = vec![leaf.clone()];
    for _ in 0..height {
        let mut next = vec![leaf.clone()];
        for op in alphabet.operations() {
            for children in tuples(&current, op.arity) {
                let t = Tree::node(op.symbol, children);
                // Children already avoid; only the root can hold a new occurrence.
                if !patterns.patterns().iter().any(|p| p.is_rooted_subtree_of(&t)) {
                    next.push(t);
                }
            }
        }
        current = next;
    }
    current.sort();
    current
}

fn tuples(items: &[Tree], arity: usize) -> Vec<Vec<Tree>> {
    let mut out: Vec<Vec<Tree>> = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .iter()
            .flat_map(|prefix| {
                items.iter().map(move |t| {
                    let mut v = prefix.clone();
                    v.push(t.clone());
                    v
                })
            })
            .collect();
    }
    out
}

/// The `v` in `L_d` with `w` in `M_v`, computed as the height-`d` truncation
/// of `w`; `None` when `w` contains a pattern.
pub fn membership_class(w: &Tree, patterns: &PatternSet) -> Option<Tree> {
    w.avoids(patterns).then(|| w.truncate(patterns.max_height()))
}

/// The same class computed from the set-theoretic definition: the unique
/// maximal (for `⊴`) element of `ld` that is a rooted subtree of `w`.
pub fn membership_class_by_definition(w: &Tree, ld: &[Tree]) -> Option<Tree> {
    let below: Vec<&Tree> = ld.iter().filter(|s| s.is_rooted_subtree_of(w)).collect();
    let maximal: Vec<&Tree> =
        below.iter().copied().filter(|s| !below.iter().any(|t| t != s && s.is_rooted_subtree_of(t))).collect();
    match maximal.as_slice() {
        [v] => Some((*v).clone()),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Nonterminal {
    Start,
    /// Index into [`Grammar::index_trees`].
    Tree(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    Terminal(char),
    Nonterminal(Nonterminal),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub head: Nonterminal,
    pub body: Vec<Symbol>,
}

#[derive(Debug, Clone)]
pub struct Grammar {
    alphabet: Alphabet,
    depth: usize,
    index_trees: Vec<Tree>,
    rules: Vec<Rule>,
    parse_index: OnceLock<ParseIndex>,
}

impl Grammar {
    /// Builds the grammar for `L(X|Y)`. A degenerate pattern set yields a
    /// grammar with no nonterminals besides `S` and an empty language.
    pub fn build(patterns: &PatternSet) -> Grammar {
        let alphabet = patterns.alphabet().clone();
        let depth = patterns.max_height();
        let ld = build_ld(patterns);
        let index: HashMap<&Tree, usize> = ld.iter().enumerate().map(|(i, t)| (t, i)).collect();

        let mut rules = Vec::new();
        for i in 0..ld.len() {
            rules.push(Rule { head: Nonterminal::Start, body: vec![Symbol::Nonterminal(Nonterminal::Tree(i))] });
        }
        let leaf = alphabet.leaf();
        if let Some(&i) = index.get(&leaf) {
            rules.push(Rule { head: Nonterminal::Tree(i), body: vec![Symbol::Terminal(leaf.label())] });
        }
        for op in alphabet.operations() {
            for children in tuples(&ld, op.arity) {
                let t = Tree::node(op.symbol, children);
                if patterns.patterns().iter().any(|p| p.is_rooted_subtree_of(&t)) {
                    continue;
                }
                let head = index[&t.truncate(depth)];
                let mut body = vec![Symbol::Terminal(op.symbol)];
                body.extend(t.children().iter().map(|c| Symbol::Nonterminal(Nonterminal::Tree(index[c]))));
                rules.push(Rule { head: Nonterminal::Tree(head), body });
            }
        }
        let mut g = Grammar { alphabet, depth, index_trees: ld, rules, parse_index: OnceLock::new() };
        g.sort_rules();
        g
    }

    fn sort_rules(&mut self) {
        let mut keyed: Vec<(String, String, Rule)> =
            self.rules.drain(..).map(|r| (self_head_key(&r.head, &self.index_trees), String::new(), r)).collect();
        for k in &mut keyed {
            k.1 = render_body(&k.2.body, &self.index_trees);
        }
        keyed.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
        self.rules = keyed.into_iter().map(|(_, _, r)| r).collect();
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// The maximal pattern height `d` the grammar was built for.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `L_d`, the trees indexing the nonterminals `T[v]`.
    pub fn index_trees(&self) -> &[Tree] {
        &self.index_trees
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Number of nonterminals, `S` included.
    pub fn nonterminal_count(&self) -> usize {
        self.index_trees.len() + 1
    }

    pub fn nonterminal_name(&self, nt: Nonterminal) -> String {
        match nt {
            Nonterminal::Start => "S".to_string(),
            Nonterminal::Tree(i) => format!("T[{}]", self.index_trees[i]),
        }
    }

    /// Rules with head `T[v]`.
    pub fn rules_for(&self, v: &Tree) -> Vec<&Rule> {
        let Some(i) = self.index_trees.iter().position(|t| t == v) else {
            return Vec::new();
        };
        self.rules.iter().filter(|r| r.head == Nonterminal::Tree(i)).collect()
    }

    /// Every non-start rule body contains a terminal.
    pub fn is_proper(&self) -> bool {
        self.rules
            .iter()
            .filter(|r| r.head != Nonterminal::Start)
            .all(|r| r.body.iter().any(|s| matches!(s, Symbol::Terminal(_))))
    }

    /// Number of distinct derivations of `word` from `S` (parse trees, which
    /// are in bijection with rightmost derivations). Counts saturate at
    /// `u64::MAX`.
    pub fn count_derivations(&self, word: &str) -> u64 {
        let w: Vec<char> = word.chars().collect();
        let len = w.len();
        if len == 0 {
            return 0;
        }
        let index = self.parse_index.get_or_init(|| ParseIndex::new(&self.rules));
        // table[nt][i][j]: derivations of w[i..j] from nt.
        let mut table = vec![vec![vec![0u64; len + 1]; len + 1]; self.nonterminal_count()];
        // starts[p]: the nonzero cells (nt, j, count) with i = p.
        let mut starts: Vec<Vec<(usize, usize, u64)>> = vec![Vec::new(); len + 1];
        for span in 1..=len {
            for i in 0..=len - span {
                let j = i + span;
                if let Some(lengths) = index.arities.get(&w[i]) {
                    for &k in lengths {
                        let mut body = Vec::with_capacity(k);
                        index.extend(w[i], k, i + 1, j, 1, &mut body, &starts, &mut table, i);
                    }
                }
                for rule in &index.generic {
                    let c = count_body(&rule.body, &w, i, j, &table, &slot);
                    if c > 0 {
                        let cell = &mut table[slot(rule.head)][i][j];
                        *cell = cell.saturating_add(c);
                    }
                }
                for (nt, row) in table.iter().enumerate() {
                    if row[i][j] > 0 {
                        starts[i].push((nt, j, row[i][j]));
                    }
                }
            }
        }
        table[0][0][len]
    }

    /// BNF-like export, one rule per line, in canonical order.
    pub fn to_bnf(&self) -> String {
        let mut out = String::new();
        for r in &self.rules {
            out.push_str(&self.nonterminal_name(r.head));
            out.push_str(" -> ");
            out.push_str(&render_body(&r.body, &self.index_trees));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct JsonRule {
            head: String,
            body: Vec<String>,
        }
        #[derive(Serialize)]
        struct JsonGrammar<'a> {
            alphabet: &'a Alphabet,
            depth: usize,
            nonterminals: Vec<String>,
            rules: Vec<JsonRule>,
        }
        let mut nonterminals = vec!["S".to_string()];
        nonterminals.extend(self.index_trees.iter().map(|t| format!("T[{t}]")));
        let rules = self
            .rules
            .iter()
            .map(|r| JsonRule {
                head: self.nonterminal_name(r.head),
                body: r.body.iter().map(|s| render_symbol(s, &self.index_trees)).collect(),
            })
            .collect();
        serde_json::to_value(JsonGrammar { alphabet: &self.alphabet, depth: self.depth, nonterminals, rules })
            .expect("grammar serializes")
    }
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bnf())
    }
}

// S sorts before every T[...] because ' ' < any label character.
fn self_head_key(nt: &Nonterminal, index_trees: &[Tree]) -> String {
    match nt {
        Nonterminal::Start => " ".to_string(),
        Nonterminal::Tree(i) => index_trees[*i].polish(),
    }
}

fn render_symbol(s: &Symbol, index_trees: &[Tree]) -> String {
    match s {
        Symbol::Terminal(c) => c.to_string(),
        Symbol::Nonterminal(Nonterminal::Start) => "S".to_string(),
        Symbol::Nonterminal(Nonterminal::Tree(i)) => format!("T[{}]", index_trees[*i]),
    }
}

fn render_body(body: &[Symbol], index_trees: &[Tree]) -> String {
    body.iter().map(|s| render_symbol(s, index_trees)).collect::<Vec<_>>().join(" ")
}

/// Ways `body` derives `w[i..j]`, each symbol covering a nonempty span.
fn slot(nt: Nonterminal) -> usize {
    match nt {
        Nonterminal::Start => 0,
        Nonterminal::Tree(i) => i + 1,
    }
}

/// Rules of the shape `head -> c N1 ... Nk` keyed by their body, so parsing
/// only tries bodies assembled from cells already known to be nonzero.
#[derive(Debug, Clone)]
struct ParseIndex {
    bodies: HashMap<(char, Vec<usize>), Vec<usize>>,
    arities: HashMap<char, BTreeSet<usize>>,
    generic: Vec<Rule>,
}

impl ParseIndex {
    fn new(rules: &[Rule]) -> Self {
        let mut index = ParseIndex { bodies: HashMap::new(), arities: HashMap::new(), generic: Vec::new() };
        for r in rules {
            let shaped = match r.body.split_first() {
                Some((Symbol::Terminal(c), rest)) => rest
                    .iter()
                    .map(|s| match s {
                        Symbol::Nonterminal(nt) => Some(slot(*nt)),
                        Symbol::Terminal(_) => None,
                    })
                    .collect::<Option<Vec<usize>>>()
                    .map(|body| (*c, body)),
                _ => None,
            };
            match shaped {
                Some((c, body)) => {
                    index.arities.entry(c).or_default().insert(body.len());
                    index.bodies.entry((c, body)).or_default().push(slot(r.head));
                }
                None => index.generic.push(r.clone()),
            }
        }
        index
    }

    /// Chains `k - body.len()` more nonzero cells from `p` to exactly `j`.
    #[allow(clippy::too_many_arguments)]
    fn extend(
        &self,
        c: char,
        k: usize,
        p: usize,
        j: usize,
        ways: u64,
        body: &mut Vec<usize>,
        starts: &[Vec<(usize, usize, u64)>],
        table: &mut [Vec<Vec<u64>>],
        i: usize,
    ) {
        if body.len() == k {
            if p == j {
                if let Some(heads) = self.bodies.get(&(c, body.clone())) {
                    for &h in heads {
                        table[h][i][j] = table[h][i][j].saturating_add(ways);
                    }
                }
            }
            return;
        }
        if p >= j {
            return;
        }
        for &(nt, q, count) in &starts[p] {
            if q <= j {
                body.push(nt);
                self.extend(c, k, q, j, ways.saturating_mul(count), body, starts, table, i);
                body.pop();
            }
        }
    }
}

fn count_body(
    body: &[Symbol],
    w: &[char],
    i: usize,
    j: usize,
    table: &[Vec<Vec<u64>>],
    slot: &impl Fn(Nonterminal) -> usize,
) -> u64 {
    if body.len() > j - i {
        return 0;
    }
    if let Some(Symbol::Terminal(c)) = body.first() {
        if w[i] != *c {
            return 0;
        }
    }
    // ways[p - i] = ways the symbols consumed so far cover w[i..p]
    let span = j - i;
    let mut ways = vec![0u64; span + 1];
    let mut next = vec![0u64; span + 1];
    ways[0] = 1;
    for sym in body {
        next.iter_mut().for_each(|v| *v = 0);
        for p in 0..span {
            if ways[p] == 0 {
                continue;
            }
            match sym {
                Symbol::Terminal(c) => {
                    if w[i + p] == *c {
                        next[p + 1] = next[p + 1].saturating_add(ways[p]);
                    }
                }
                Symbol::Nonterminal(nt) => {
                    let row = &table[slot(*nt)][i + p];
                    for q in p + 1..=span {
                        let r = row[i + q];
                        if r > 0 {
                            next[q] = next[q].saturating_add(ways[p].saturating_mul(r));
                        }
                    }
                }
            }
        }
        std::mem::swap(&mut ways, &mut next);
    }
    ways[span]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(word: &str) -> Tree {
        Tree::parse(word, &Alphabet::binary()).unwrap()
    }

    fn set(words: &str) -> PatternSet {
        PatternSet::parse(Alphabet::binary(), words).unwrap()
    }

    #[test]
    fn ld_examples() {
        let ld = build_ld(&set("mmxxx"));
        assert_eq!(ld, vec![b("mxmxx"), b("mxx"), b("x")]);
        assert_eq!(build_ld(&set("")), vec![b("x")]);
        assert_eq!(build_ld(&set("mxx")), vec![b("x")]);
        assert!(build_ld(&set("x")).is_empty());
    }

    #[test]
    fn membership_examples() {
        let y = set("mmxxx");
        assert_eq!(membership_class(&b("x"), &y), Some(b("x")));
        assert_eq!(membership_class(&b("mxmxmxx"), &y), Some(b("mxmxx")));
        assert_eq!(membership_class(&b("mmxxx"), &y), None);
    }

    #[test]
    fn associativity_grammar() {
        let g = Grammar::build(&set("mmxxx"));
        assert_eq!(g.nonterminal_count(), 4);
        let bodies: Vec<String> =
            g.rules_for(&b("mxmxx")).iter().map(|r| render_body(&r.body, g.index_trees())).collect();
        assert_eq!(bodies, ["m T[x] T[mxmxx]", "m T[x] T[mxx]"]);
        assert_eq!(
            g.to_bnf(),
            "S -> T[mxmxx]\nS -> T[mxx]\nS -> T[x]\n\
             T[mxmxx] -> m T[x] T[mxmxx]\nT[mxmxx] -> m T[x] T[mxx]\n\
             T[mxx] -> m T[x] T[x]\nT[x] -> x\n"
        );
        assert!(g.is_proper());
    }

    #[test]
    fn free_grammar_is_catalan() {
        let g = Grammar::build(&set(""));
        assert_eq!(g.to_bnf(), "S -> T[x]\nT[x] -> m T[x] T[x]\nT[x] -> x\n");
    }

    #[test]
    fn trivial_and_degenerate_grammars() {
        let g = Grammar::build(&set("mxx"));
        assert_eq!(g.to_bnf(), "S -> T[x]\nT[x] -> x\n");
        assert_eq!(g.count_derivations("x"), 1);
        assert_eq!(g.count_derivations("mxx"), 0);
        let g = Grammar::build(&set("x"));
        assert_eq!(g.rules().len(), 0);
        assert_eq!(g.count_derivations("x"), 0);
    }

    #[test]
    fn derivation_counts() {
        let g = Grammar::build(&set("mmxxx"));
        assert_eq!(g.count_derivations("mxmxmxx"), 1);
        assert_eq!(g.count_derivations("mmxxx"), 0);
        assert_eq!(g.count_derivations("mxm"), 0);
        assert_eq!(g.count_derivations(""), 0);
    }

    #[test]
    fn json_export_lists_rules() {
        let g = Grammar::build(&set("mmxxx"));
        let v = g.to_json();
        assert_eq!(v["nonterminals"].as_array().unwrap().len(), 4);
        assert_eq!(v["rules"][3]["body"], serde_json::json!(["m", "T[x]", "T[mxmxx]"]));
    }
}
