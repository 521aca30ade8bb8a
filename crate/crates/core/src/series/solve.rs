//! Online coefficient-by-coefficient solver.
//!
//! For a proper system the coefficient of `x^n` in every unknown depends only
//! on coefficients of lower degree, so the solution is built one degree at a
//! time. Monomials sharing an equation, `x`/`y` exponents and all but their
//! last unknown are merged into `x^a y^b * P * L` where `P` is a product of
//! unknowns and `L` a linear combination; every partial product is a node
//! whose coefficients are extended lazily and shared between equations.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};

use super::ypoly::{Coeff, YPoly};
use super::{BiSeries, Series, TruncatedSeries};
use crate::error::Result;
use crate::systems::{AlgebraicSystem, Monomial};

/// Every unknown and the target, each modulo `x^(K+1)`.
#[derive(Debug, Clone)]
pub struct Solution {
    pub unknowns: Vec<TruncatedSeries>,
    pub target: TruncatedSeries,
}

/// Solves a proper system to order `K`.
pub fn solve_truncated(system: &AlgebraicSystem, order: usize) -> Result<Solution> {
    system.check_proper()?;
    if system.is_bivariate() {
        let mut engine = Engine::<YPoly>::new(system);
        engine.run(order);
        let vars = [system.vars()[0].as_str(), system.vars()[1].as_str()];
        let convert = |coeffs: &[YPoly]| TruncatedSeries::Bi(bi_series(vars, coeffs));
        Ok(Solution {
            unknowns: engine.unknowns.iter().map(|c| convert(c)).collect(),
            target: convert(&engine.target()),
        })
    } else {
        let mut engine = Engine::<BigUint>::new(system);
        engine.run(order);
        let var = system.vars()[0].as_str();
        let convert = |coeffs: &[BigUint]| TruncatedSeries::Uni(uni_series(var, coeffs));
        Ok(Solution {
            unknowns: engine.unknowns.iter().map(|c| convert(c)).collect(),
            target: convert(&engine.target()),
        })
    }
}

/// Like [`solve_truncated`] but only materialises the target.
pub fn solve_target(system: &AlgebraicSystem, order: usize) -> Result<TruncatedSeries> {
    system.check_proper()?;
    if system.is_bivariate() {
        let mut engine = Engine::<YPoly>::new(system);
        engine.run(order);
        let vars = [system.vars()[0].as_str(), system.vars()[1].as_str()];
        Ok(TruncatedSeries::Bi(bi_series(vars, &engine.target())))
    } else {
        let mut engine = Engine::<BigUint>::new(system);
        engine.run(order);
        Ok(TruncatedSeries::Uni(uni_series(system.vars()[0].as_str(), &engine.target())))
    }
}

fn uni_series(var: &str, coeffs: &[BigUint]) -> Series {
    Series::from_coeffs(var, coeffs.iter().map(|c| BigInt::from(c.clone())).collect())
}

fn bi_series(vars: [&str; 2], coeffs: &[YPoly]) -> BiSeries {
    let order = coeffs.len() - 1;
    let terms = coeffs
        .iter()
        .enumerate()
        .flat_map(|(n, p)| p.coeffs().iter().enumerate().map(move |(k, c)| (n, k, BigInt::from(c.clone()))));
    BiSeries::from_terms(vars, order, terms)
}

/// A shared prefix and the `(last factor, coefficient)` pairs completing it.
type PrefixGroup = (Vec<usize>, Vec<(usize, u64)>);

/// Splits each monomial of one shape into `prefix * last`, greedily choosing
/// the prefix shared by the most monomials so that few products are formed.
fn cover_by_prefixes(monomials: &[&Monomial]) -> Vec<PrefixGroup> {
    let mut candidates: BTreeMap<Vec<usize>, Vec<(usize, usize)>> = BTreeMap::new();
    for (i, m) in monomials.iter().enumerate() {
        for (j, &u) in m.unknowns.iter().enumerate() {
            if j > 0 && m.unknowns[j - 1] == u {
                continue;
            }
            let mut prefix = m.unknowns.clone();
            prefix.remove(j);
            candidates.entry(prefix).or_default().push((i, u));
        }
    }
    let mut assigned = vec![false; monomials.len()];
    let mut left = monomials.len();
    let mut out = Vec::new();
    while left > 0 {
        let mut best: Option<(&Vec<usize>, usize)> = None;
        for (prefix, members) in &candidates {
            let open = members.iter().filter(|(i, _)| !assigned[*i]).count();
            if open > best.map_or(0, |(_, c)| c) {
                best = Some((prefix, open));
            }
        }
        let (prefix, _) = best.expect("an unassigned monomial has a candidate");
        let mut combo = Vec::new();
        for &(i, u) in &candidates[prefix] {
            if !assigned[i] {
                assigned[i] = true;
                left -= 1;
                combo.push((u, monomials[i].coeff));
            }
        }
        out.push((prefix.clone(), combo));
    }
    out
}

struct Factor<C> {
    terms: Vec<(usize, u64)>,
    /// Coefficients of the combination; unused when it is a bare unknown.
    cache: Vec<C>,
}

struct Node<C> {
    parent: Option<usize>,
    factor: usize,
    coeffs: Vec<C>,
}

struct Term {
    node: usize,
    x_exp: usize,
    y_exp: u32,
}

struct Constant {
    x_exp: usize,
    y_exp: u32,
    coeff: u64,
}

struct Engine<C> {
    factors: Vec<Factor<C>>,
    nodes: Vec<Node<C>>,
    terms: Vec<Vec<Term>>,
    constants: Vec<Vec<Constant>>,
    target_terms: Vec<(usize, u64)>,
    unknowns: Vec<Vec<C>>,
}

impl<C: Coeff> Engine<C> {
    fn new(system: &AlgebraicSystem) -> Self {
        let mut engine = Engine {
            factors: Vec::new(),
            nodes: Vec::new(),
            terms: Vec::new(),
            constants: Vec::new(),
            target_terms: system.target().to_vec(),
            unknowns: vec![vec![C::default()]; system.len()],
        };
        let mut factor_ids = HashMap::new();
        let mut node_ids = HashMap::new();
        for eq in system.equations() {
            let mut by_shape: BTreeMap<(u32, u32, usize), Vec<&Monomial>> = BTreeMap::new();
            let mut constants = Vec::new();
            for m in eq {
                if m.unknowns.is_empty() {
                    constants.push(Constant { x_exp: m.x_exp as usize, y_exp: m.y_exp, coeff: m.coeff });
                } else {
                    by_shape.entry((m.x_exp, m.y_exp, m.unknowns.len())).or_default().push(m);
                }
            }
            let mut terms = Vec::new();
            for ((x_exp, y_exp, _), monomials) in by_shape {
                for (prefix, mut combo) in cover_by_prefixes(&monomials) {
                    combo.sort_unstable();
                    let mut parent = None;
                    for &u in &prefix {
                        let f = engine.intern_factor(&mut factor_ids, vec![(u, 1)]);
                        parent = Some(engine.intern_node(&mut node_ids, parent, f));
                    }
                    let f = engine.intern_factor(&mut factor_ids, combo);
                    let node = engine.intern_node(&mut node_ids, parent, f);
                    terms.push(Term { node, x_exp: x_exp as usize, y_exp });
                }
            }
            engine.terms.push(terms);
            engine.constants.push(constants);
        }
        engine
    }

    fn intern_factor(&mut self, ids: &mut HashMap<Vec<(usize, u64)>, usize>, terms: Vec<(usize, u64)>) -> usize {
        *ids.entry(terms.clone()).or_insert_with(|| {
            self.factors.push(Factor { terms, cache: vec![C::default()] });
            self.factors.len() - 1
        })
    }

    fn intern_node(
        &mut self,
        ids: &mut HashMap<(Option<usize>, usize), usize>,
        parent: Option<usize>,
        factor: usize,
    ) -> usize {
        *ids.entry((parent, factor)).or_insert_with(|| {
            self.nodes.push(Node { parent, factor, coeffs: vec![C::default()] });
            self.nodes.len() - 1
        })
    }

    fn is_bare(&self, f: usize) -> bool {
        matches!(self.factors[f].terms.as_slice(), [(_, 1)])
    }

    fn factor_coeff(&self, f: usize, m: usize) -> &C {
        let factor = &self.factors[f];
        match factor.terms.as_slice() {
            [(u, 1)] => &self.unknowns[*u][m],
            _ => &factor.cache[m],
        }
    }

    fn ensure_factor(&mut self, f: usize, m: usize) {
        if self.is_bare(f) {
            return;
        }
        while self.factors[f].cache.len() <= m {
            let deg = self.factors[f].cache.len();
            let mut value = C::default();
            for &(u, c) in &self.factors[f].terms {
                value.add_term(&self.unknowns[u][deg], c, 0);
            }
            self.factors[f].cache.push(value);
        }
    }

    fn node_coeff(&self, id: usize, m: usize) -> &C {
        let node = &self.nodes[id];
        match node.parent {
            None => self.factor_coeff(node.factor, m),
            Some(_) => &node.coeffs[m],
        }
    }

    fn ensure_node(&mut self, id: usize, m: usize) {
        let Node { parent, factor, .. } = self.nodes[id];
        let Some(parent) = parent else {
            self.ensure_factor(factor, m);
            return;
        };
        if self.nodes[id].coeffs.len() > m {
            return;
        }
        self.ensure_node(parent, m - 1);
        self.ensure_factor(factor, m - 1);
        let mut coeffs = std::mem::take(&mut self.nodes[id].coeffs);
        let mut pairs = Vec::new();
        while coeffs.len() <= m {
            let deg = coeffs.len();
            pairs.clear();
            for i in 1..deg {
                let a = self.node_coeff(parent, i);
                if a.is_nil() {
                    continue;
                }
                let b = self.factor_coeff(factor, deg - i);
                if !b.is_nil() {
                    pairs.push((a, b));
                }
            }
            coeffs.push(C::dot(&pairs));
        }
        self.nodes[id].coeffs = coeffs;
    }

    fn run(&mut self, order: usize) {
        for n in 1..=order {
            for u in 0..self.unknowns.len() {
                let mut value = C::default();
                for c in &self.constants[u] {
                    if c.x_exp == n {
                        value.add_constant(c.coeff, c.y_exp);
                    }
                }
                for t in 0..self.terms[u].len() {
                    let Term { node, x_exp, y_exp } = self.terms[u][t];
                    if x_exp >= n {
                        continue;
                    }
                    self.ensure_node(node, n - x_exp);
                    value.add_term(self.node_coeff(node, n - x_exp), 1, y_exp);
                }
                self.unknowns[u].push(value);
            }
        }
    }

    fn target(&self) -> Vec<C> {
        let len = self.unknowns.first().map_or(1, Vec::len);
        (0..len)
            .map(|n| {
                let mut value = C::default();
                for &(u, c) in &self.target_terms {
                    value.add_term(&self.unknowns[u][n], c, 0);
                }
                value
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Picard iteration with plain series arithmetic: after `K + 1` rounds
    /// from zero every coefficient up to `x^K` is final.
    fn picard(system: &AlgebraicSystem, order: usize) -> Vec<BiSeries> {
        let vars = ["x", "y"];
        let mut current = vec![BiSeries::zero(vars, order); system.len()];
        for _ in 0..=order {
            current = system
                .equations()
                .iter()
                .map(|eq| {
                    let mut acc = BiSeries::zero(vars, order);
                    for m in eq {
                        let mut prod = BiSeries::from_terms(vars, order, [(0, 0, BigInt::from(m.coeff))]);
                        for &u in &m.unknowns {
                            prod = prod.mul(&current[u]);
                        }
                        acc = acc.add(&prod.scale_monomial(&BigInt::from(1), m.x_exp as usize, m.y_exp as usize));
                    }
                    acc
                })
                .collect();
        }
        current
    }

    fn as_bi(s: &TruncatedSeries) -> BiSeries {
        match s {
            TruncatedSeries::Bi(b) => b.clone(),
            TruncatedSeries::Uni(u) => BiSeries::from_terms(
                ["x", "y"],
                u.order(),
                u.coeffs().iter().enumerate().map(|(n, c)| (n, 0, c.clone())),
            ),
        }
    }

    fn system(vars: &[&str], eqs: Vec<Vec<Monomial>>) -> AlgebraicSystem {
        let names = (0..eqs.len()).map(|i| format!("F[{i}]")).collect();
        let target = (0..eqs.len()).map(|i| (i, 1)).collect();
        AlgebraicSystem::new(vars.iter().map(|v| v.to_string()).collect(), names, eqs, target).unwrap()
    }

    #[test]
    fn catalan() {
        let sys = system(&["x"], vec![vec![Monomial::new(1, 1, 0, vec![]), Monomial::new(1, 1, 0, vec![0, 0])]]);
        let sol = solve_truncated(&sys, 11).unwrap();
        assert_eq!(sol.target.to_text(), "x + x^3 + 2*x^5 + 5*x^7 + 14*x^9 + 42*x^11");
    }

    #[test]
    fn matches_picard_iteration() {
        let systems = [
            system(
                &["x"],
                vec![
                    vec![
                        Monomial::new(1, 1, 0, vec![]),
                        Monomial::new(2, 1, 0, vec![0, 1]),
                        Monomial::new(1, 0, 0, vec![1, 1, 1]),
                    ],
                    vec![Monomial::new(3, 2, 0, vec![0]), Monomial::new(1, 0, 0, vec![0, 0])],
                ],
            ),
            system(
                &["x", "y"],
                vec![
                    vec![
                        Monomial::new(1, 1, 0, vec![]),
                        Monomial::new(1, 1, 1, vec![0, 0]),
                        Monomial::new(4, 1, 0, vec![0, 2]),
                    ],
                    vec![Monomial::new(1, 1, 2, vec![0, 1, 2]), Monomial::new(1, 3, 0, vec![])],
                    vec![Monomial::new(2, 0, 1, vec![0, 1]), Monomial::new(1, 1, 3, vec![2])],
                ],
            ),
        ];
        for sys in &systems {
            let sol = solve_truncated(sys, 14).unwrap();
            let oracle = picard(sys, 14);
            for (got, want) in sol.unknowns.iter().zip(&oracle) {
                assert_eq!(&as_bi(got), want);
            }
            assert_eq!(solve_target(sys, 14).unwrap(), sol.target);
        }
    }

    #[test]
    fn improper_systems_are_rejected() {
        let sys = AlgebraicSystem::new(
            vec!["x".into()],
            vec!["F".into()],
            vec![vec![Monomial::new(1, 0, 0, vec![0]), Monomial::new(1, 1, 0, vec![])]],
            vec![(0, 1)],
        );
        assert!(sys.is_err() || solve_truncated(&sys.unwrap(), 5).is_err());
    }
}
