//! Exact truncated power series and the solver for proper systems.
//!
//! Univariate series are dense; bivariate series (the second variable marks
//! pattern occurrences) are sparse maps keyed by `(x-degree, y-degree)`.
//! Truncation is always in the first variable: a series of order `K` keeps
//! the coefficients of total `x`-degree at most `K`.

mod solve;
mod ypoly;

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::systems::{avoidance_system, compact_enumeration_system};
use crate::trees::{Alphabet, PatternSet, Tree};

pub use solve::{solve_target, solve_truncated, Solution};
pub use ypoly::YPoly;

/// Univariate series `sum a_n x^n`, `n <= order`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Series {
    var: String,
    coeffs: Vec<BigInt>,
}

impl Series {
    pub fn zero(var: &str, order: usize) -> Self {
        Series { var: var.to_string(), coeffs: vec![BigInt::zero(); order + 1] }
    }

    /// Coefficients from degree 0; the order is `coeffs.len() - 1`.
    pub fn from_coeffs(var: &str, coeffs: Vec<BigInt>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series keeps at least the constant term");
        Series { var: var.to_string(), coeffs }
    }

    pub fn from_i64(var: &str, coeffs: &[i64]) -> Self {
        Self::from_coeffs(var, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn monomial(var: &str, order: usize, degree: usize, coeff: BigInt) -> Self {
        let mut s = Self::zero(var, order);
        if degree <= order {
            s.coeffs[degree] = coeff;
        }
        s
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &BigInt {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn truncate(&self, order: usize) -> Series {
        assert!(order <= self.order(), "cannot extend a truncated series");
        Series { var: self.var.clone(), coeffs: self.coeffs[..=order].to_vec() }
    }

    fn common_order(&self, other: &Series) -> usize {
        self.order().min(other.order())
    }

    pub fn add(&self, other: &Series) -> Series {
        let k = self.common_order(other);
        Series { var: self.var.clone(), coeffs: (0..=k).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect() }
    }

    pub fn sub(&self, other: &Series) -> Series {
        let k = self.common_order(other);
        Series { var: self.var.clone(), coeffs: (0..=k).map(|i| &self.coeffs[i] - &other.coeffs[i]).collect() }
    }

    pub fn scale(&self, c: &BigInt) -> Series {
        Series { var: self.var.clone(), coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Product modulo `x^(K+1)`, `K` the smaller order.
    pub fn mul(&self, other: &Series) -> Series {
        let k = self.common_order(other);
        let mut out = vec![BigInt::zero(); k + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(k + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(k + 1 - i) {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Series { var: self.var.clone(), coeffs: out }
    }

    pub fn pow(&self, e: u32) -> Series {
        let mut acc = Series::monomial(&self.var, self.order(), 0, BigInt::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn is_nonnegative(&self) -> bool {
        !self.coeffs.iter().any(Signed::is_negative)
    }

    /// Human-readable polynomial form, e.g. `x + x^3 + 2*x^5`; `0` when zero.
    pub fn to_text(&self) -> String {
        let terms = self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(n, c)| {
            let mono = match n {
                0 => String::new(),
                1 => self.var.clone(),
                n => format!("{}^{n}", self.var),
            };
            (c.clone(), mono)
        });
        render_terms(terms)
    }
}

/// Bivariate series `sum a_{n,k} x^n y^k`, `n <= order`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BiSeries {
    vars: [String; 2],
    order: usize,
    coeffs: BTreeMap<(usize, usize), BigInt>,
}

impl BiSeries {
    pub fn zero(vars: [&str; 2], order: usize) -> Self {
        BiSeries { vars: vars.map(str::to_string), order, coeffs: BTreeMap::new() }
    }

    /// Builds from `(n, k, coeff)` triples, dropping zeros and terms above `order`.
    pub fn from_terms(vars: [&str; 2], order: usize, terms: impl IntoIterator<Item = (usize, usize, BigInt)>) -> Self {
        let mut s = Self::zero(vars, order);
        for (n, k, c) in terms {
            if n <= order {
                s.add_term(n, k, c);
            }
        }
        s
    }

    fn add_term(&mut self, n: usize, k: usize, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry((n, k)).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&(n, k));
        }
    }

    pub fn vars(&self) -> [&str; 2] {
        [&self.vars[0], &self.vars[1]]
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, n: usize, k: usize) -> BigInt {
        self.coeffs.get(&(n, k)).cloned().unwrap_or_default()
    }

    /// Nonzero terms in `(n, k)` order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> {
        self.coeffs.iter().map(|(&(n, k), c)| (n, k, c))
    }

    pub fn truncate(&self, order: usize) -> BiSeries {
        assert!(order <= self.order, "cannot extend a truncated series");
        BiSeries {
            vars: self.vars.clone(),
            order,
            coeffs: self.coeffs.range(..(order + 1, 0)).map(|(&k, v)| (k, v.clone())).collect(),
        }
    }

    pub fn add(&self, other: &BiSeries) -> BiSeries {
        let order = self.order.min(other.order);
        let mut out = self.truncate(order);
        for (n, k, c) in other.terms() {
            if n <= order {
                out.add_term(n, k, c.clone());
            }
        }
        out
    }

    pub fn mul(&self, other: &BiSeries) -> BiSeries {
        let order = self.order.min(other.order);
        let mut out = BiSeries { vars: self.vars.clone(), order, coeffs: BTreeMap::new() };
        for (n1, k1, a) in self.terms() {
            for (n2, k2, b) in other.terms() {
                if n1 + n2 <= order {
                    out.add_term(n1 + n2, k1 + k2, a * b);
                }
            }
        }
        out
    }

    /// Multiplies by `c * x^n * y^k`.
    pub fn scale_monomial(&self, c: &BigInt, n: usize, k: usize) -> BiSeries {
        BiSeries::from_terms(self.vars(), self.order, self.terms().map(|(a, b, v)| (a + n, b + k, v * c)))
    }

    /// The `y = 0` slice.
    pub fn at_y_zero(&self) -> Series {
        let mut s = Series::zero(&self.vars[0], self.order);
        for (n, k, c) in self.terms() {
            if k == 0 {
                s.coeffs[n] = c.clone();
            }
        }
        s
    }

    pub fn is_nonnegative(&self) -> bool {
        !self.coeffs.values().any(Signed::is_negative)
    }

    /// Human-readable form, e.g. `x + x^3*y + 2*x^5*y^2`.
    pub fn to_text(&self) -> String {
        let terms = self.terms().map(|(n, k, c)| {
            let mut parts = Vec::new();
            for (v, e) in [(&self.vars[0], n), (&self.vars[1], k)] {
                match e {
                    0 => {}
                    1 => parts.push(v.clone()),
                    e => parts.push(format!("{v}^{e}")),
                }
            }
            (c.clone(), parts.join("*"))
        });
        render_terms(terms)
    }
}

pub(crate) fn render_terms(terms: impl Iterator<Item = (BigInt, String)>) -> String {
    let mut out = String::new();
    for (c, mono) in terms {
        let neg = c.is_negative();
        let mag = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        match (mono.is_empty(), mag.is_one()) {
            (true, _) => write!(out, "{mag}").unwrap(),
            (false, true) => out.push_str(&mono),
            (false, false) => write!(out, "{mag}*{mono}").unwrap(),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Either kind of series, with the byte-stable serialization used as a
/// classification key.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TruncatedSeries {
    Uni(Series),
    Bi(BiSeries),
}

#[derive(Serialize)]
struct CanonicalForm<'a> {
    vars: Vec<&'a str>,
    order: usize,
    /// `[exponents, decimal coefficient]`, sorted by exponents, zeros omitted.
    terms: Vec<(Vec<usize>, String)>,
}

impl TruncatedSeries {
    pub fn order(&self) -> usize {
        match self {
            TruncatedSeries::Uni(s) => s.order(),
            TruncatedSeries::Bi(s) => s.order(),
        }
    }

    pub fn truncate(&self, order: usize) -> TruncatedSeries {
        match self {
            TruncatedSeries::Uni(s) => TruncatedSeries::Uni(s.truncate(order)),
            TruncatedSeries::Bi(s) => TruncatedSeries::Bi(s.truncate(order)),
        }
    }

    pub fn as_uni(&self) -> Option<&Series> {
        match self {
            TruncatedSeries::Uni(s) => Some(s),
            TruncatedSeries::Bi(_) => None,
        }
    }

    pub fn as_bi(&self) -> Option<&BiSeries> {
        match self {
            TruncatedSeries::Bi(s) => Some(s),
            TruncatedSeries::Uni(_) => None,
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        match self {
            TruncatedSeries::Uni(s) => s.is_nonnegative(),
            TruncatedSeries::Bi(s) => s.is_nonnegative(),
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            TruncatedSeries::Uni(s) => s.to_text(),
            TruncatedSeries::Bi(s) => s.to_text(),
        }
    }

    fn canonical_form(&self) -> CanonicalForm<'_> {
        match self {
            TruncatedSeries::Uni(s) => CanonicalForm {
                vars: vec![s.var()],
                order: s.order(),
                terms: s
                    .coeffs()
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(n, c)| (vec![n], c.to_string()))
                    .collect(),
            },
            TruncatedSeries::Bi(s) => CanonicalForm {
                vars: s.vars().to_vec(),
                order: s.order(),
                terms: s.terms().map(|(n, k, c)| (vec![n, k], c.to_string())).collect(),
            },
        }
    }

    /// Canonical JSON: `{"vars":[...],"order":K,"terms":[[[n,k],"c"],...]}`.
    /// Two series are equal iff their canonical JSON is byte-identical.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(&self.canonical_form()).expect("canonical form serializes")
    }

    /// Hex SHA-256 of [`TruncatedSeries::canonical_json`].
    pub fn key_hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Nonzero coefficients up to degree `max_degree`, in canonical order.
    pub fn prefix_text(&self, max_degree: usize) -> String {
        self.truncate(max_degree.min(self.order())).to_text()
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Serialize for TruncatedSeries {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.canonical_form().serialize(serializer)
    }
}

fn check_binary_pattern(pattern: &Tree) -> Result<()> {
    PatternSet::single(Alphabet::binary(), pattern.clone())?;
    if pattern.leaf_count() < 2 {
        return Err(Error::Degenerate(format!("pattern {pattern} has no internal node")));
    }
    Ok(())
}

/// `Av_t(x)` modulo `x^(K+1)`, counting trees by vertices.
pub fn av_series(pattern: &Tree, order: usize) -> Result<Series> {
    check_binary_pattern(pattern)?;
    let set = PatternSet::single(Alphabet::binary(), pattern.clone())?;
    let sol = solve_truncated(&avoidance_system(&set)?, order)?;
    Ok(sol.target.as_uni().expect("univariate system").clone())
}

/// `En_t(x, y)` modulo `x^(K+1)`.
pub fn en_series(pattern: &Tree, order: usize) -> Result<BiSeries> {
    check_binary_pattern(pattern)?;
    let sol = solve_truncated(&compact_enumeration_system(pattern)?, order)?;
    Ok(sol.target.as_bi().expect("bivariate system").clone())
}

/// Reindexes a binary-tree series by leaves: the coefficient of `z^k` is the
/// coefficient of `x^(2k-1)`. The result has order `(K+1)/2`.
pub fn to_operad_series(av: &Series) -> Result<Series> {
    if let Some(n) = (0..=av.order()).step_by(2).find(|&n| !av.coeff(n).is_zero()) {
        return Err(Error::Parity(n));
    }
    let order = av.order().div_ceil(2);
    let mut coeffs = vec![BigInt::zero(); order + 1];
    for (k, c) in coeffs.iter_mut().enumerate().skip(1) {
        *c = av.coeff(2 * k - 1).clone();
    }
    Ok(Series::from_coeffs("z", coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(word: &str) -> Tree {
        Tree::parse(word, &Alphabet::binary()).unwrap()
    }

    #[test]
    fn arithmetic() {
        let one_minus_x = Series::from_i64("x", &[1, -1, 0, 0, 0]);
        let geometric = Series::from_i64("x", &[1, 1, 1, 1, 1]);
        assert_eq!(one_minus_x.mul(&geometric), Series::from_i64("x", &[1, 0, 0, 0, 0]));
        assert_eq!(geometric.pow(2), Series::from_i64("x", &[1, 2, 3, 4, 5]));
        assert_eq!(geometric.sub(&one_minus_x).to_text(), "2*x + x^2 + x^3 + x^4");
        assert_eq!(Series::zero("x", 3).to_text(), "0");
        assert_eq!(Series::from_i64("x", &[-2, 0, -1]).to_text(), "-2 - x^2");
    }

    #[test]
    fn bivariate_text_and_slices() {
        let s = BiSeries::from_terms(
            ["x", "y"],
            7,
            [(1, 0, 1), (3, 1, 1), (5, 2, 2), (7, 3, 5), (9, 4, 14)].map(|(n, k, c)| (n, k, BigInt::from(c))),
        );
        assert_eq!(s.to_text(), "x + x^3*y + 2*x^5*y^2 + 5*x^7*y^3");
        assert_eq!(s.at_y_zero().to_text(), "x");
        assert_eq!(s.truncate(3).to_text(), "x + x^3*y");
    }

    #[test]
    fn canonical_json_is_stable() {
        let s = TruncatedSeries::Uni(Series::from_i64("x", &[0, 1, 0, 2]));
        assert_eq!(s.canonical_json(), r#"{"vars":["x"],"order":3,"terms":[[[1],"1"],[[3],"2"]]}"#);
        assert_eq!(s.key_hash().len(), 64);
        let t = TruncatedSeries::Uni(Series::from_i64("x", &[0, 1, 0, 2, 0]));
        assert_ne!(s.canonical_json(), t.canonical_json());
    }

    #[test]
    fn operad_reindexing() {
        let av = Series::from_i64("x", &[0, 1, 0, 1, 0, 1, 0, 1, 0, 1]);
        assert_eq!(to_operad_series(&av).unwrap(), Series::from_i64("z", &[0, 1, 1, 1, 1, 1]));
        let catalan = Series::from_i64("x", &[0, 1, 0, 1, 0, 2, 0, 5, 0, 14]);
        assert_eq!(to_operad_series(&catalan).unwrap(), Series::from_i64("z", &[0, 1, 1, 2, 5, 14]));
        let bad = Series::from_i64("x", &[0, 1, 3]);
        assert!(matches!(to_operad_series(&bad), Err(Error::Parity(2))));
    }

    #[test]
    fn pattern_series() {
        let av = av_series(&b("mmxxx"), 11).unwrap();
        assert_eq!(av, Series::from_i64("x", &[0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1]));
        assert_eq!(av_series(&b("mxx"), 5).unwrap().to_text(), "x");
        let en = en_series(&b("mxx"), 7).unwrap();
        assert_eq!(en.to_text(), "x + x^3*y + 2*x^5*y^2 + 5*x^7*y^3");
        assert!(av_series(&Tree::leaf('x'), 5).is_err());
        assert!(en_series(&Tree::leaf('x'), 5).is_err());
    }
}
