//! Sparse multivariate polynomials over the integers and resultants.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exponent vectors compare lexicographically, so the last key is the
/// leading term for lex order with variable 0 largest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct MPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BigInt) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn monomial(nvars: usize, exps: Vec<u32>, c: BigInt) -> Self {
        debug_assert_eq!(exps.len(), nvars);
        let mut p = Self::zero(nvars);
        p.add_term(exps, c);
        p
    }

    pub fn var(nvars: usize, v: usize) -> Self {
        let mut e = vec![0; nvars];
        e[v] = 1;
        Self::monomial(nvars, e, BigInt::one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigInt)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, exps: Vec<u32>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn neg(&self) -> MPoly {
        MPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|e| e[v]).max().unwrap_or(0)
    }

    /// Coefficients of `self` as a polynomial in variable `v`, lowest first.
    pub fn coefficients_in(&self, v: usize) -> Vec<MPoly> {
        let mut out = vec![MPoly::zero(self.nvars); self.degree_in(v) as usize + 1];
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2[v] = 0;
            out[e[v] as usize].add_term(e2, c.clone());
        }
        out
    }

    /// Gcd of the integer coefficients, positive; zero for the zero polynomial.
    pub fn integer_content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides out the integer content and the largest monomial in the
    /// variables listed in `vars`.
    pub fn strip(&self, vars: &[usize]) -> MPoly {
        if self.is_zero() {
            return self.clone();
        }
        let g = self.integer_content();
        let mut low = vec![0u32; self.nvars];
        for &v in vars {
            low[v] = self.terms.keys().map(|e| e[v]).min().unwrap_or(0);
        }
        let terms =
            self.terms.iter().map(|(e, c)| (e.iter().zip(&low).map(|(a, b)| a - b).collect(), c / &g)).collect();
        MPoly { nvars: self.nvars, terms }
    }

    /// Exact quotient, or `None` when `divisor` does not divide `self`.
    pub fn exact_div(&self, divisor: &MPoly) -> Option<MPoly> {
        let (lead_e, lead_c) = divisor.terms.last_key_value()?;
        let mut rem = self.clone();
        let mut quot = MPoly::zero(self.nvars);
        while let Some((e, c)) = rem.terms.last_key_value() {
            if e.iter().zip(lead_e).any(|(a, b)| a < b) {
                return None;
            }
            let (q, r) = c.div_rem(lead_c);
            if !r.is_zero() {
                return None;
            }
            let shift: Vec<u32> = e.iter().zip(lead_e).map(|(a, b)| a - b).collect();
            for (de, dc) in &divisor.terms {
                let te = de.iter().zip(&shift).map(|(a, b)| a + b).collect();
                rem.add_term(te, -(dc * &q));
            }
            quot.add_term(shift, q);
        }
        Some(quot)
    }

    /// `sign(lead) = +1`, for canonical comparisons.
    #[cfg(test)]
    pub fn with_positive_lead(self) -> MPoly {
        match self.terms.last_key_value() {
            Some((_, c)) if *c < BigInt::zero() => self.neg(),
            _ => self,
        }
    }
}

fn check_deadline(deadline: Option<Instant>) -> Result<()> {
    match deadline {
        Some(d) if Instant::now() >= d => Err(Error::Deadline),
        _ => Ok(()),
    }
}

/// Resultant with respect to variable `v` by a fraction-free (Bareiss)
/// determinant of the Sylvester matrix.
pub(crate) fn resultant(a: &MPoly, b: &MPoly, v: usize, deadline: Option<Instant>) -> Result<MPoly> {
    let nvars = a.nvars;
    let ca = a.coefficients_in(v);
    let cb = b.coefficients_in(v);
    let (m, n) = (ca.len() - 1, cb.len() - 1);
    if m == 0 {
        return Ok(pow(&ca[0], n));
    }
    if n == 0 {
        return Ok(pow(&cb[0], m));
    }
    let size = m + n;
    let mut mat = vec![vec![MPoly::zero(nvars); size]; size];
    for i in 0..n {
        for (j, c) in ca.iter().rev().enumerate() {
            mat[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in cb.iter().rev().enumerate() {
            mat[n + i][i + j] = c.clone();
        }
    }
    let mut prev = MPoly::constant(nvars, BigInt::one());
    let mut negate = false;
    for k in 0..size - 1 {
        if mat[k][k].is_zero() {
            match (k + 1..size).find(|&i| !mat[i][k].is_zero()) {
                Some(i) => {
                    mat.swap(k, i);
                    negate = !negate;
                }
                None => return Ok(MPoly::zero(nvars)),
            }
        }
        for i in k + 1..size {
            check_deadline(deadline)?;
            for j in k + 1..size {
                let num = mat[i][j].mul(&mat[k][k]).sub(&mat[i][k].mul(&mat[k][j]));
                mat[i][j] = num.exact_div(&prev).expect("Bareiss steps divide exactly");
            }
            mat[i][k] = MPoly::zero(nvars);
        }
        prev = mat[k][k].clone();
    }
    let det = mat[size - 1][size - 1].clone();
    Ok(if negate { det.neg() } else { det })
}

fn pow(p: &MPoly, e: usize) -> MPoly {
    let mut acc = MPoly::constant(p.nvars, BigInt::one());
    for _ in 0..e {
        acc = acc.mul(p);
    }
    acc
}
