//! Coefficient rings for the online solver.

use num_bigint::BigUint;
use num_traits::Zero;

/// What the solver needs from a coefficient of `x^n`.
pub(crate) trait Coeff: Clone + Default {
    fn is_nil(&self) -> bool;
    /// `sum a_i * b_i`.
    fn dot(pairs: &[(&Self, &Self)]) -> Self;
    /// `self += c * y^shift * other`.
    fn add_term(&mut self, other: &Self, c: u64, shift: u32);
    /// `self += c * y^shift`.
    fn add_constant(&mut self, c: u64, shift: u32);
}

impl Coeff for BigUint {
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }

    fn dot(pairs: &[(&Self, &Self)]) -> Self {
        let mut acc = BigUint::zero();
        for (a, b) in pairs {
            acc += *a * *b;
        }
        acc
    }

    fn add_term(&mut self, other: &Self, c: u64, shift: u32) {
        debug_assert_eq!(shift, 0, "univariate coefficient");
        if c == 1 {
            *self += other;
        } else {
            *self += other * c;
        }
    }

    fn add_constant(&mut self, c: u64, shift: u32) {
        debug_assert_eq!(shift, 0, "univariate coefficient");
        *self += c;
    }
}

/// Polynomial in `y` with nonnegative integer coefficients, index = exponent.
/// Never stores trailing zeros.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct YPoly(Vec<BigUint>);

impl YPoly {
    pub fn from_coeffs(mut coeffs: Vec<BigUint>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        YPoly(coeffs)
    }

    pub fn coeffs(&self) -> &[BigUint] {
        &self.0
    }

    fn max_bits(&self) -> u64 {
        self.0.iter().map(BigUint::bits).max().unwrap_or(0)
    }

    /// Kronecker substitution `y = 2^(32 * slot)`.
    fn pack(&self, slot: usize) -> BigUint {
        let mut digits = vec![0u32; self.0.len() * slot];
        for (i, c) in self.0.iter().enumerate() {
            let d = c.to_u32_digits();
            digits[i * slot..i * slot + d.len()].copy_from_slice(&d);
        }
        BigUint::new(digits)
    }

    fn unpack(value: &BigUint, slot: usize) -> Self {
        let digits = value.to_u32_digits();
        YPoly::from_coeffs(digits.chunks(slot).map(BigUint::from_slice).collect())
    }

    fn schoolbook_dot(pairs: &[(&Self, &Self)]) -> Self {
        let len = pairs.iter().map(|(a, b)| a.0.len() + b.0.len() - 1).max().unwrap_or(0);
        let mut out = vec![BigUint::zero(); len];
        for (a, b) in pairs {
            for (i, x) in a.0.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (j, y) in b.0.iter().enumerate() {
                    if !y.is_zero() {
                        out[i + j] += x * y;
                    }
                }
            }
        }
        YPoly::from_coeffs(out)
    }
}

impl Coeff for YPoly {
    fn is_nil(&self) -> bool {
        self.0.is_empty()
    }

    fn dot(pairs: &[(&Self, &Self)]) -> Self {
        if pairs.is_empty() {
            return YPoly::default();
        }
        let cells: usize = pairs.iter().map(|(a, b)| a.0.len().min(b.0.len())).sum();
        if pairs.iter().all(|(a, b)| a.0.len().min(b.0.len()) <= 2) && cells < 64 {
            return Self::schoolbook_dot(pairs);
        }
        // Each output slot is a sum of at most `cells` products; size the
        // slots so no carry crosses into the next one.
        let product_bits = pairs.iter().map(|(a, b)| a.max_bits() + b.max_bits()).max().unwrap_or(0);
        let bits = product_bits + u64::from(usize::BITS - cells.leading_zeros()) + 1;
        let slot = bits.div_ceil(32) as usize;
        let mut acc = BigUint::zero();
        for (a, b) in pairs {
            acc += a.pack(slot) * b.pack(slot);
        }
        Self::unpack(&acc, slot)
    }

    fn add_term(&mut self, other: &Self, c: u64, shift: u32) {
        if c == 0 || other.0.is_empty() {
            return;
        }
        let shift = shift as usize;
        if self.0.len() < other.0.len() + shift {
            self.0.resize(other.0.len() + shift, BigUint::zero());
        }
        for (i, v) in other.0.iter().enumerate() {
            if c == 1 {
                self.0[i + shift] += v;
            } else {
                self.0[i + shift] += v * c;
            }
        }
    }

    fn add_constant(&mut self, c: u64, shift: u32) {
        if c == 0 {
            return;
        }
        let shift = shift as usize;
        if self.0.len() <= shift {
            self.0.resize(shift + 1, BigUint::zero());
        }
        self.0[shift] += c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[u64]) -> YPoly {
        YPoly::from_coeffs(c.iter().map(|&v| BigUint::from(v)).collect())
    }

    #[test]
    fn packed_dot_matches_schoolbook() {
        let big = BigUint::from(3u32).pow(200);
        let a = YPoly::from_coeffs(vec![big.clone(), BigUint::from(7u32), BigUint::zero(), big.clone() + 1u32]);
        let b = poly(&[u64::MAX, 0, 5, 1, 9]);
        let c = poly(&[1, 2, 3]);
        let pairs = [(&a, &b), (&c, &a), (&b, &b)];
        assert_eq!(YPoly::dot(&pairs), YPoly::schoolbook_dot(&pairs));
    }

    #[test]
    fn trimming_and_shifts() {
        assert!(poly(&[0, 0]).is_nil());
        let mut p = YPoly::default();
        p.add_term(&poly(&[1, 2]), 3, 2);
        p.add_constant(4, 0);
        assert_eq!(p, poly(&[4, 0, 3, 6]));
    }
}
