//! Elimination of unknowns by iterated resultants, and exact algebra on the
//! resulting polynomials `P(x, G)`.

mod mpoly;
mod upoly;

use std::fmt;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::{render_terms, Series};
use crate::systems::AlgebraicSystem;
use mpoly::{resultant, MPoly};

/// Default cap on the number of unknowns accepted by [`eliminate`].
pub const DEFAULT_MAX_UNKNOWNS: usize = 12;

/// Polynomial in `G` whose coefficients are integer polynomials in `x`.
/// `coeffs[g][n]` is the coefficient of `x^n G^g`. Never stores trailing
/// zeros in either direction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BivarPoly {
    coeffs: Vec<Vec<BigInt>>,
}

impl BivarPoly {
    pub fn from_coeffs(coeffs: Vec<Vec<BigInt>>) -> Self {
        let mut coeffs: Vec<Vec<BigInt>> = coeffs.into_iter().map(upoly::trim).collect();
        while coeffs.last().is_some_and(Vec::is_empty) {
            coeffs.pop();
        }
        BivarPoly { coeffs }
    }

    /// Builds from `(x-degree, G-degree, coeff)` triples.
    pub fn from_terms(terms: impl IntoIterator<Item = (usize, usize, BigInt)>) -> Self {
        let mut coeffs: Vec<Vec<BigInt>> = Vec::new();
        for (n, g, c) in terms {
            if coeffs.len() <= g {
                coeffs.resize(g + 1, Vec::new());
            }
            if coeffs[g].len() <= n {
                coeffs[g].resize(n + 1, BigInt::zero());
            }
            coeffs[g][n] += c;
        }
        Self::from_coeffs(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree in `G`; `None` for the zero polynomial.
    pub fn degree_g(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn degree_x(&self) -> Option<usize> {
        self.coeffs.iter().filter(|c| !c.is_empty()).map(|c| c.len() - 1).max()
    }

    /// Coefficient of `G^g` as a polynomial in `x`, lowest degree first.
    pub fn coeff(&self, g: usize) -> &[BigInt] {
        self.coeffs.get(g).map_or(&[], Vec::as_slice)
    }

    /// Nonzero terms as `(x-degree, G-degree, coeff)`, in canonical order:
    /// descending `G`, then ascending `x`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> {
        self.coeffs
            .iter()
            .enumerate()
            .rev()
            .flat_map(|(g, row)| row.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(n, c)| (n, g, c)))
    }

    pub fn term_count(&self) -> usize {
        self.terms().count()
    }

    pub fn add(&self, other: &BivarPoly) -> BivarPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        BivarPoly::from_coeffs((0..len).map(|g| upoly::add(self.coeff(g), other.coeff(g))).collect())
    }

    pub fn sub(&self, other: &BivarPoly) -> BivarPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> BivarPoly {
        BivarPoly { coeffs: self.coeffs.iter().map(|row| row.iter().map(|c| -c).collect()).collect() }
    }

    pub fn mul(&self, other: &BivarPoly) -> BivarPoly {
        if self.is_zero() || other.is_zero() {
            return BivarPoly::default();
        }
        let mut out = vec![Vec::new(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = upoly::add(&out[i + j], &upoly::mul(a, b));
            }
        }
        BivarPoly::from_coeffs(out)
    }

    /// Gcd in `Z[x]` of all coefficients, with positive leading coefficient.
    pub fn content(&self) -> Vec<BigInt> {
        self.coeffs.iter().fold(Vec::new(), |g, c| upoly::gcd(&g, c))
    }

    /// `self` divided by its content.
    pub fn primitive_part(&self) -> BivarPoly {
        let c = self.content();
        if c.is_empty() {
            return self.clone();
        }
        BivarPoly::from_coeffs(
            self.coeffs
                .iter()
                .map(|row| upoly::div_exact(row, &c).expect("content divides every coefficient"))
                .collect(),
        )
    }

    /// Divides out the largest power of `G` dividing `self`.
    pub fn without_g_power(&self) -> BivarPoly {
        let low = self.coeffs.iter().position(|c| !c.is_empty()).unwrap_or(0);
        BivarPoly { coeffs: self.coeffs[low..].to_vec() }
    }

    /// Unit normalisation: the lowest-degree term of the leading
    /// `G`-coefficient is made positive.
    pub fn normalized_sign(&self) -> BivarPoly {
        let negative =
            self.coeffs.last().and_then(|lead| lead.iter().find(|c| !c.is_zero())).is_some_and(Signed::is_negative);
        if negative {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Substitutes `G := series` and reduces modulo `x^(K+1)`, `K` the
    /// series order.
    pub fn evaluate(&self, series: &Series) -> Series {
        let order = series.order();
        let var = series.var();
        let mut acc = Series::zero(var, order);
        let mut power = Series::monomial(var, order, 0, BigInt::one());
        for (g, row) in self.coeffs.iter().enumerate() {
            if g > 0 {
                power = power.mul(series);
            }
            if row.is_empty() {
                continue;
            }
            let mut c = row.clone();
            c.resize(c.len().max(order + 1), BigInt::zero());
            c.truncate(order + 1);
            acc = acc.add(&Series::from_coeffs(var, c).mul(&power));
        }
        acc
    }

    /// Canonical text, e.g. `x*G^2 - G + x`: terms by descending `G`-degree,
    /// then ascending `x`-degree; unit coefficients and exponents omitted.
    pub fn to_text(&self) -> String {
        render_terms(self.terms().map(|(n, g, c)| {
            let mut parts = Vec::new();
            match n {
                0 => {}
                1 => parts.push("x".to_string()),
                n => parts.push(format!("x^{n}")),
            }
            match g {
                0 => {}
                1 => parts.push("G".to_string()),
                g => parts.push(format!("G^{g}")),
            }
            (c.clone(), parts.join("*"))
        }))
    }

    /// Parses a sum of terms `c*x^a*G^b` in any factor order; whitespace is
    /// ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Invalid("empty polynomial".into()));
        }
        if s == "0" {
            return Ok(BivarPoly::default());
        }
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = s.as_bytes();
        for i in 1..=bytes.len() {
            if i == bytes.len() || ((bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^') {
                terms.push(parse_term(&s[start..i])?);
                start = i;
            }
        }
        Ok(BivarPoly::from_terms(terms))
    }
}

fn parse_term(term: &str) -> Result<(usize, usize, BigInt)> {
    let bad = || Error::Invalid(format!("cannot parse polynomial term `{term}`"));
    let (negative, body) = match term.as_bytes().first() {
        Some(b'-') => (true, &term[1..]),
        Some(b'+') => (false, &term[1..]),
        _ => (false, term),
    };
    if body.is_empty() {
        return Err(bad());
    }
    let mut coeff = BigInt::one();
    let (mut n, mut g) = (0usize, 0usize);
    for factor in body.split('*') {
        let (base, exp) = match factor.split_once('^') {
            Some((b, e)) => (b, e.parse::<usize>().map_err(|_| bad())?),
            None => (factor, 1),
        };
        match base {
            "x" => n += exp,
            "G" => g += exp,
            digits if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) => {
                let v: BigInt = digits.parse().map_err(|_| bad())?;
                coeff *= num_traits::pow(v, exp);
            }
            _ => return Err(bad()),
        }
    }
    Ok((n, g, if negative { -coeff } else { coeff }))
}

impl fmt::Display for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Serialize for BivarPoly {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_text())
    }
}

/// True iff `p = q * r` for some `r` in `Q[x][G]`.
pub fn poly_divides(p: &BivarPoly, q: &BivarPoly) -> Result<bool> {
    let Some(dq) = q.degree_g() else {
        return Err(Error::DivisionByZero);
    };
    let to_q =
        |row: &[BigInt]| -> Vec<BigRational> { row.iter().map(|c| BigRational::from_integer(c.clone())).collect() };
    let divisor: Vec<Vec<BigRational>> = q.coeffs.iter().map(|r| to_q(r)).collect();
    let mut rem: Vec<Vec<BigRational>> = p.coeffs.iter().map(|r| to_q(r)).collect();
    while let Some(dr) = rem.len().checked_sub(1) {
        if dr < dq {
            return Ok(false);
        }
        let Some(t) = upoly::div_exact_rational(&rem[dr], &divisor[dq]) else {
            return Ok(false);
        };
        for (i, row) in divisor.iter().enumerate() {
            let prod = upoly::mul_rational(&t, row);
            rem[dr - dq + i] = upoly::sub_rational(&rem[dr - dq + i], &prod);
        }
        debug_assert!(rem[dr].is_empty());
        while rem.last().is_some_and(Vec::is_empty) {
            rem.pop();
        }
    }
    Ok(true)
}

/// True iff `p(x, series) = 0` modulo `x^(K+1)`. `K` is clamped to the
/// order of the series.
pub fn annihilates(p: &BivarPoly, series: &Series, order: usize) -> bool {
    let s = series.truncate(order.min(series.order()));
    p.evaluate(&s).is_zero()
}

#[derive(Debug, Clone)]
pub struct EliminationOptions {
    pub max_unknowns: usize,
    /// Cooperative cancellation, checked between resultant row operations.
    pub deadline: Option<Instant>,
    /// Explicit elimination order (unknown indices); the default is ascending
    /// occurrence count, ties by index.
    pub order: Option<Vec<usize>>,
}

impl Default for EliminationOptions {
    fn default() -> Self {
        EliminationOptions { max_unknowns: DEFAULT_MAX_UNKNOWNS, deadline: None, order: None }
    }
}

const X: usize = 0;
const G: usize = 1;

/// Eliminates every unknown of a univariate proper system and returns a
/// nonzero `P(x, G)` annihilating its target series.
///
/// The target becomes a new unknown `G` with equation `G = sum c_u F_u`.
/// Each step picks the equation of least degree in the current unknown and
/// replaces every other equation containing it by their resultant. The
/// result is reduced to its primitive part, stripped of powers of `G` and
/// sign-normalised.
pub fn eliminate(system: &AlgebraicSystem, options: &EliminationOptions) -> Result<BivarPoly> {
    if system.is_bivariate() {
        return Err(Error::Invalid("elimination needs a univariate system".into()));
    }
    if system.len() > options.max_unknowns {
        return Err(Error::Bound(format!(
            "{} unknowns exceed the elimination bound of {}",
            system.len(),
            options.max_unknowns
        )));
    }
    system.check_proper()?;
    let nvars = system.len() + 2;
    let unknown = |u: usize| MPoly::var(nvars, u + 2);
    let mut polys: Vec<MPoly> = Vec::new();
    for (u, eq) in system.equations().iter().enumerate() {
        let mut rhs = MPoly::zero(nvars);
        for m in eq {
            let mut exps = vec![0u32; nvars];
            exps[X] = m.x_exp;
            for &v in &m.unknowns {
                exps[v + 2] += 1;
            }
            rhs = rhs.add(&MPoly::monomial(nvars, exps, BigInt::from(m.coeff)));
        }
        polys.push(unknown(u).sub(&rhs));
    }
    let mut target = MPoly::var(nvars, G);
    for &(u, c) in system.target() {
        target = target.sub(&unknown(u).mul(&MPoly::constant(nvars, BigInt::from(c))));
    }
    polys.push(target);

    let order = match &options.order {
        Some(order) => {
            let mut sorted = order.clone();
            sorted.sort_unstable();
            if sorted != (0..system.len()).collect::<Vec<_>>() {
                return Err(Error::Invalid("elimination order must list every unknown once".into()));
            }
            order.clone()
        }
        None => {
            let counts = system.occurrence_counts();
            let mut order: Vec<usize> = (0..system.len()).collect();
            order.sort_by_key(|&u| (counts[u], u));
            order
        }
    };

    for u in order {
        let v = u + 2;
        let (with, mut rest): (Vec<MPoly>, Vec<MPoly>) = polys.into_iter().partition(|p| p.degree_in(v) > 0);
        let Some(pivot_at) = (0..with.len()).min_by_key(|&i| (with[i].degree_in(v), with[i].term_count())) else {
            polys = rest;
            continue;
        };
        for (i, p) in with.iter().enumerate() {
            if i == pivot_at {
                continue;
            }
            let r = resultant(p, &with[pivot_at], v, options.deadline)?.strip(&[X, G]);
            if r.is_zero() {
                return Err(Error::Elimination(format!(
                    "resultant in {} vanished: the equations share a factor; make them square-free and primitive first",
                    system.unknowns()[u]
                )));
            }
            if r.terms().all(|(e, _)| e.iter().all(|&d| d == 0)) {
                return Err(Error::Elimination("the system is inconsistent".into()));
            }
            rest.push(r);
        }
        polys = rest;
    }

    let best = polys
        .iter()
        .filter(|p| p.degree_in(G) > 0)
        .min_by_key(|p| (p.degree_in(G), p.degree_in(X), p.term_count()))
        .ok_or_else(|| Error::Elimination("no equation involving the target survived".into()))?;
    let bivar = BivarPoly::from_terms(best.terms().map(|(e, c)| (e[X] as usize, e[G] as usize, c.clone())));
    Ok(bivar.primitive_part().without_g_power().normalized_sign())
}

/// Two annihilating polynomials for the avoidance series of one Wilf class
/// of 8-leaf patterns, as transcribed fixtures. The quintic is divisible by
/// the quartic, so both define the same series.
pub mod certificate {
    use super::*;

    pub const QUINTIC: &str = include_str!("../../fixtures/n8_quintic.poly");
    pub const QUARTIC: &str = include_str!("../../fixtures/n8_quartic.poly");
    /// A pattern whose avoidance series both polynomials annihilate.
    pub const WITNESS: &str = "mmmxmmxmxxxxmxx";

    pub fn quintic() -> BivarPoly {
        BivarPoly::parse(QUINTIC).expect("fixture parses")
    }

    pub fn quartic() -> BivarPoly {
        BivarPoly::parse(QUARTIC).expect("fixture parses")
    }

    #[derive(Debug, Clone, Serialize)]
    pub struct CertificateCheck {
        pub order: usize,
        pub divides: bool,
        pub quartic_annihilates: bool,
        pub quintic_annihilates: bool,
    }

    impl CertificateCheck {
        pub fn passed(&self) -> bool {
            self.divides && self.quartic_annihilates && self.quintic_annihilates
        }
    }

    /// Checks divisibility and annihilation of the witness series at `order`.
    pub fn check(order: usize) -> Result<CertificateCheck> {
        let pattern = crate::trees::Tree::parse(WITNESS, &crate::trees::Alphabet::binary())?;
        let series = crate::series::av_series(&pattern, order)?;
        let (p, q) = (quintic(), quartic());
        Ok(CertificateCheck {
            order,
            divides: poly_divides(&p, &q)?,
            quartic_annihilates: annihilates(&q, &series, order),
            quintic_annihilates: annihilates(&p, &series, order),
        })
    }
}
