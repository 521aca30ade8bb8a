//! Fixed-point polynomial systems `unknown = polynomial` with nonnegative
//! integer coefficients.
//!
//! Weight variables are the first (primary, truncation) variable and an
//! optional second variable that marks pattern occurrences. Three
//! constructions live here: one unknown per grammar nonterminal, one per
//! stamp, and one per truncation state of an occurrence-marking automaton.
//! The [`automaton`] submodule has the compact, minimised variant used by the
//! classification sweep.

pub mod automaton;

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grammar::{self, Grammar, Nonterminal, Symbol};
use crate::trees::{Alphabet, PatternSet, Tree};

pub use automaton::{avoidance_system, compact_enumeration_system, MatchAutomaton};

/// `coeff * x^x_exp * y^y_exp * prod(unknowns)`; `unknowns` is sorted and may
/// repeat.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Monomial {
    pub unknowns: Vec<usize>,
    pub x_exp: u32,
    pub y_exp: u32,
    pub coeff: u64,
}

impl Monomial {
    pub fn new(coeff: u64, x_exp: u32, y_exp: u32, mut unknowns: Vec<usize>) -> Self {
        unknowns.sort_unstable();
        Monomial { unknowns, x_exp, y_exp, coeff }
    }

    /// The coefficient of degree `n` in the primary variable depends only on
    /// lower-degree coefficients of the unknowns.
    pub fn is_proper(&self) -> bool {
        self.x_exp >= 1 || self.unknowns.len() >= 2
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlgebraicSystem {
    /// One or two weight variable names; the first is the truncation variable.
    vars: Vec<String>,
    unknowns: Vec<String>,
    equations: Vec<Vec<Monomial>>,
    /// Target series as a nonnegative combination of unknowns.
    target: Vec<(usize, u64)>,
}

impl AlgebraicSystem {
    /// Normalises (merges equal monomials, drops zero coefficients, sorts)
    /// and checks shape. Properness is checked separately, by
    /// [`AlgebraicSystem::check_proper`].
    pub fn new(
        vars: Vec<String>,
        unknowns: Vec<String>,
        equations: Vec<Vec<Monomial>>,
        target: Vec<(usize, u64)>,
    ) -> Result<Self> {
        if vars.is_empty() || vars.len() > 2 {
            return Err(Error::Invalid(format!("expected 1 or 2 weight variables, got {}", vars.len())));
        }
        if equations.len() != unknowns.len() {
            return Err(Error::Invalid(format!("{} equations for {} unknowns", equations.len(), unknowns.len())));
        }
        let n = unknowns.len();
        let mut normalized = Vec::with_capacity(n);
        for eq in equations {
            let mut merged: BTreeMap<(Vec<usize>, u32, u32), u64> = BTreeMap::new();
            for m in eq {
                if m.unknowns.iter().any(|&u| u >= n) {
                    return Err(Error::Invalid("monomial refers to an unknown out of range".into()));
                }
                if vars.len() == 1 && m.y_exp > 0 {
                    return Err(Error::Invalid("second weight variable used in a univariate system".into()));
                }
                let mut u = m.unknowns;
                u.sort_unstable();
                *merged.entry((u, m.x_exp, m.y_exp)).or_insert(0) += m.coeff;
            }
            normalized.push(
                merged
                    .into_iter()
                    .filter(|(_, c)| *c != 0)
                    .map(|((unknowns, x_exp, y_exp), coeff)| Monomial { unknowns, x_exp, y_exp, coeff })
                    .collect(),
            );
        }
        let mut t: BTreeMap<usize, u64> = BTreeMap::new();
        for (u, c) in target {
            if u >= n {
                return Err(Error::Invalid("target refers to an unknown out of range".into()));
            }
            *t.entry(u).or_insert(0) += c;
        }
        let target = t.into_iter().filter(|(_, c)| *c != 0).collect();
        Ok(AlgebraicSystem { vars, unknowns, equations: normalized, target })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn is_bivariate(&self) -> bool {
        self.vars.len() == 2
    }

    pub fn unknowns(&self) -> &[String] {
        &self.unknowns
    }

    pub fn equations(&self) -> &[Vec<Monomial>] {
        &self.equations
    }

    pub fn target(&self) -> &[(usize, u64)] {
        &self.target
    }

    pub fn len(&self) -> usize {
        self.unknowns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unknowns.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.unknowns.iter().position(|u| u == name)
    }

    pub fn is_proper(&self) -> bool {
        self.check_proper().is_ok()
    }

    pub fn check_proper(&self) -> Result<()> {
        for (i, eq) in self.equations.iter().enumerate() {
            if let Some(m) = eq.iter().find(|m| !m.is_proper()) {
                return Err(Error::NotProper(format!(
                    "monomial {} in the equation of {}",
                    self.render_monomial(m),
                    self.unknowns[i]
                )));
            }
        }
        Ok(())
    }

    /// Total number of occurrences of each unknown across all right-hand
    /// sides and the target.
    pub fn occurrence_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.len()];
        for eq in &self.equations {
            for m in eq {
                for &u in &m.unknowns {
                    counts[u] += 1;
                }
            }
        }
        for &(u, _) in &self.target {
            counts[u] += 1;
        }
        counts
    }

    fn render_monomial(&self, m: &Monomial) -> String {
        let mut factors: Vec<String> = Vec::new();
        for (var, e) in self.vars.iter().zip([m.x_exp, m.y_exp]) {
            match e {
                0 => {}
                1 => factors.push(var.clone()),
                e => factors.push(format!("{var}^{e}")),
            }
        }
        let mut i = 0;
        while i < m.unknowns.len() {
            let u = m.unknowns[i];
            let run = m.unknowns[i..].iter().take_while(|&&v| v == u).count();
            if run == 1 {
                factors.push(self.unknowns[u].clone());
            } else {
                factors.push(format!("{}^{run}", self.unknowns[u]));
            }
            i += run;
        }
        match (m.coeff, factors.is_empty()) {
            (c, true) => c.to_string(),
            (1, false) => factors.join("*"),
            (c, false) => format!("{c}*{}", factors.join("*")),
        }
    }

    /// Canonical text form: a header naming the weight variables, one
    /// equation per line in unknown order, then the target.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "vars: {}", self.vars.join(", ")).unwrap();
        for (name, eq) in self.unknowns.iter().zip(&self.equations) {
            let rhs = if eq.is_empty() {
                "0".to_string()
            } else {
                eq.iter().map(|m| self.render_monomial(m)).collect::<Vec<_>>().join(" + ")
            };
            writeln!(out, "{name} = {rhs}").unwrap();
        }
        let target = if self.target.is_empty() {
            "0".to_string()
        } else {
            self.target
                .iter()
                .map(|&(u, c)| if c == 1 { self.unknowns[u].clone() } else { format!("{c}*{}", self.unknowns[u]) })
                .collect::<Vec<_>>()
                .join(" + ")
        };
        writeln!(out, "target = {target}").unwrap();
        out
    }
}

impl fmt::Display for AlgebraicSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Weight of each terminal as a vector over one or two weight variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Weights {
    vars: Vec<String>,
    map: BTreeMap<char, (u32, u32)>,
}

impl Weights {
    /// Every symbol weighs one `x`: the series counts trees by vertices.
    pub fn vertex(alphabet: &Alphabet) -> Self {
        Weights { vars: vec!["x".into()], map: alphabet.labels().iter().map(|l| (l.symbol, (1, 0))).collect() }
    }

    /// Only free ends weigh one `z`: the series counts trees by leaves, i.e.
    /// it is the generating series of the monomial operad.
    pub fn leaf(alphabet: &Alphabet) -> Self {
        Weights {
            vars: vec!["z".into()],
            map: alphabet.labels().iter().map(|l| (l.symbol, (u32::from(l.arity == 0), 0))).collect(),
        }
    }

    pub fn custom(vars: Vec<String>, map: BTreeMap<char, (u32, u32)>) -> Self {
        Weights { vars, map }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    fn of(&self, c: char) -> Result<(u32, u32)> {
        self.map.get(&c).copied().ok_or_else(|| Error::Invalid(format!("no weight for terminal '{c}'")))
    }
}

/// Chomsky–Schützenberger system of a grammar: one unknown `H[v]` per
/// nonterminal `T[v]`, each rule contributing the product of its terminal
/// weights and body unknowns. The target sums the unknowns reachable from `S`.
pub fn cs_system(grammar: &Grammar, weights: &Weights) -> Result<AlgebraicSystem> {
    let trees = grammar.index_trees();
    let unknowns: Vec<String> = trees.iter().map(|t| format!("H[{t}]")).collect();
    let mut equations = vec![Vec::new(); trees.len()];
    let mut target = Vec::new();
    for rule in grammar.rules() {
        match rule.head {
            Nonterminal::Start => {
                for s in &rule.body {
                    match s {
                        Symbol::Nonterminal(Nonterminal::Tree(i)) => target.push((*i, 1)),
                        _ => return Err(Error::Invalid("start rules must be unit rules S -> T[v]".into())),
                    }
                }
            }
            Nonterminal::Tree(head) => {
                let (mut xe, mut ye, mut us) = (0, 0, Vec::new());
                for s in &rule.body {
                    match s {
                        Symbol::Terminal(c) => {
                            let (a, b) = weights.of(*c)?;
                            xe += a;
                            ye += b;
                        }
                        Symbol::Nonterminal(Nonterminal::Tree(i)) => us.push(*i),
                        Symbol::Nonterminal(Nonterminal::Start) => {
                            return Err(Error::Invalid("start symbol on a right-hand side".into()))
                        }
                    }
                }
                equations[head].push(Monomial::new(1, xe, ye, us));
            }
        }
    }
    let sys = AlgebraicSystem::new(weights.vars().to_vec(), unknowns, equations, target)?;
    sys.check_proper()?;
    Ok(sys)
}

/// Stamp system in the leaf variable `z`: its target is the generating series
/// of the monomial operad defined by the patterns.
pub fn stamp_system(patterns: &PatternSet) -> AlgebraicSystem {
    stamp_system_weighted(patterns, &Weights::leaf(patterns.alphabet())).expect("leaf weights cover the alphabet")
}

/// Stamp system with explicit weights. Stamps are the avoiding trees of height
/// below the maximal pattern height; `Y[v]` counts avoiders whose truncation at
/// that height is `v`, so the unknowns sum to the whole language.
pub fn stamp_system_weighted(patterns: &PatternSet, weights: &Weights) -> Result<AlgebraicSystem> {
    let alphabet = patterns.alphabet();
    let level = patterns.max_height().max(1) - 1;
    let stamps = grammar::avoiders_up_to_height(patterns, level);
    let index: HashMap<&Tree, usize> = stamps.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut equations = vec![Vec::new(); stamps.len()];
    let leaf = alphabet.leaf();
    if let Some(&i) = index.get(&leaf) {
        let (a, b) = weights.of(leaf.label())?;
        equations[i].push(Monomial::new(1, a, b, vec![]));
    }
    for op in alphabet.operations() {
        let (a, b) = weights.of(op.symbol)?;
        for_each_tuple(stamps.len(), op.arity, |tuple| {
            let t = Tree::node(op.symbol, tuple.iter().map(|&i| stamps[i].clone()).collect());
            if patterns.patterns().iter().any(|p| p.is_rooted_subtree_of(&t)) {
                return;
            }
            let head = index[&t.truncate(level)];
            equations[head].push(Monomial::new(1, a, b, tuple.to_vec()));
        });
    }
    let unknowns = stamps.iter().map(|t| format!("Y[{t}]")).collect();
    let target = (0..stamps.len()).map(|i| (i, 1)).collect();
    AlgebraicSystem::new(weights.vars().to_vec(), unknowns, equations, target)
}

pub(crate) fn for_each_tuple(base: usize, arity: usize, mut f: impl FnMut(&[usize])) {
    if base == 0 && arity > 0 {
        return;
    }
    let mut tuple = vec![0usize; arity];
    loop {
        f(&tuple);
        let mut pos = arity;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            tuple[pos] += 1;
            if tuple[pos] < base {
                break;
            }
            tuple[pos] = 0;
        }
    }
}

/// Largest number of truncation states [`enumeration_system`] accepts.
pub const MAX_TRUNCATION_STATES: usize = 1000;

/// Occurrence-marking system over truncation states: one unknown `F[s]` per
/// binary tree `s` of height below the pattern height. `F[s]` counts trees
/// whose truncation is `s`, weighted by `x` per vertex and `y` per occurrence
/// of `pattern`; the target is `En_t(x, y)`.
pub fn enumeration_system(pattern: &Tree) -> Result<AlgebraicSystem> {
    let alphabet = Alphabet::binary();
    PatternSet::single(alphabet.clone(), pattern.clone())?;
    if pattern.is_leaf() {
        return Err(Error::Degenerate(
            "the bare free end occurs at every vertex; its enumeration is the vertex count".into(),
        ));
    }
    let level = pattern.height() - 1;
    let states = crate::grammar::avoiders_up_to_height(&PatternSet::empty(alphabet), level);
    if states.len() > MAX_TRUNCATION_STATES {
        return Err(Error::Bound(format!(
            "{} truncation states for a pattern of height {} (limit {MAX_TRUNCATION_STATES}); \
             use the compact automaton system",
            states.len(),
            pattern.height()
        )));
    }
    let index: HashMap<&Tree, usize> = states.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut equations = vec![Vec::new(); states.len()];
    equations[index[&Tree::leaf('x')]].push(Monomial::new(1, 1, 0, vec![]));
    for (i, s1) in states.iter().enumerate() {
        for (j, s2) in states.iter().enumerate() {
            let t = Tree::node('m', vec![s1.clone(), s2.clone()]);
            let mark = u32::from(pattern.is_rooted_subtree_of(&t));
            let head = index[&t.truncate(level)];
            equations[head].push(Monomial::new(1, 1, mark, vec![i, j]));
        }
    }
    let unknowns = states.iter().map(|t| format!("F[{t}]")).collect();
    let target = (0..states.len()).map(|i| (i, 1)).collect();
    AlgebraicSystem::new(vec!["x".into(), "y".into()], unknowns, equations, target)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(words: &str) -> PatternSet {
        PatternSet::parse(Alphabet::binary(), words).unwrap()
    }

    #[test]
    fn catalan_cs_system() {
        let g = Grammar::build(&set(""));
        let s = cs_system(&g, &Weights::vertex(g.alphabet())).unwrap();
        assert_eq!(s.to_text(), "vars: x\nH[x] = x + x*H[x]^2\ntarget = H[x]\n");
    }

    #[test]
    fn associativity_cs_system() {
        let g = Grammar::build(&set("mmxxx"));
        let s = cs_system(&g, &Weights::vertex(g.alphabet())).unwrap();
        assert_eq!(
            s.to_text(),
            "vars: x\n\
             H[mxmxx] = x*H[mxmxx]*H[x] + x*H[mxx]*H[x]\n\
             H[mxx] = x*H[x]^2\n\
             H[x] = x\n\
             target = H[mxmxx] + H[mxx] + H[x]\n"
        );
        let leaf = cs_system(&g, &Weights::leaf(g.alphabet())).unwrap();
        assert!(leaf.is_proper());
    }

    #[test]
    fn unary_leaf_weights_are_not_proper() {
        let a = Alphabet::parse("u:1,m:2,x:0").unwrap();
        let g = Grammar::build(&PatternSet::parse(a.clone(), "mxx").unwrap());
        assert!(matches!(cs_system(&g, &Weights::leaf(&a)), Err(Error::NotProper(_))));
        assert!(cs_system(&g, &Weights::vertex(&a)).is_ok());
    }

    #[test]
    fn stamp_systems() {
        let s = stamp_system(&set(""));
        assert_eq!(s.to_text(), "vars: z\nY[x] = z + Y[x]^2\ntarget = Y[x]\n");
        let s = stamp_system(&set("mmxxx"));
        assert_eq!(s.to_text(), "vars: z\nY[mxx] = Y[mxx]*Y[x] + Y[x]^2\nY[x] = z\ntarget = Y[mxx] + Y[x]\n");
        assert!(s.is_proper());
        assert!(stamp_system(&set("x")).is_empty());
    }

    #[test]
    fn truncation_enumeration_system() {
        let s = enumeration_system(&Tree::parse("mxx", &Alphabet::binary()).unwrap()).unwrap();
        assert_eq!(s.to_text(), "vars: x, y\nF[x] = x + x*y*F[x]^2\ntarget = F[x]\n");
        let s = enumeration_system(&Tree::parse("mmxxx", &Alphabet::binary()).unwrap()).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.is_proper());
        assert!(matches!(enumeration_system(&Tree::leaf('x')), Err(Error::Degenerate(_))));
        let comb = Tree::parse("mmmmmmxxxxxxx", &Alphabet::binary()).unwrap();
        assert!(matches!(enumeration_system(&comb), Err(Error::Bound(_))));
    }

    #[test]
    fn normalisation_merges_monomials() {
        let s = AlgebraicSystem::new(
            vec!["x".into()],
            vec!["A".into()],
            vec![vec![
                Monomial::new(1, 1, 0, vec![0, 0]),
                Monomial::new(2, 1, 0, vec![0, 0]),
                Monomial::new(0, 1, 0, vec![]),
            ]],
            vec![(0, 1), (0, 1)],
        )
        .unwrap();
        assert_eq!(s.to_text(), "vars: x\nA = 3*x*A^2\ntarget = 2*A\n");
        let bad = AlgebraicSystem::new(
            vec!["x".into()],
            vec!["A".into()],
            vec![vec![Monomial::new(1, 0, 0, vec![0])]],
            vec![],
        );
        assert!(!bad.unwrap().is_proper());
    }
}
