//! Dense univariate polynomials in `x`, lowest degree first, no trailing
//! zeros. The empty vector is zero.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

pub(crate) fn trim<T: Zero>(mut p: Vec<T>) -> Vec<T> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

pub(crate) fn add(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let len = a.len().max(b.len());
    trim((0..len).map(|i| a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default()).collect())
}

pub(crate) fn mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn integer_content(a: &[BigInt]) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

/// Exact quotient in `Z[x]`, or `None`.
pub(crate) fn div_exact(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
    let lead = b.last()?;
    let mut rem = a.to_vec();
    if rem.len() < b.len() {
        return rem.is_empty().then(Vec::new);
    }
    let mut quot = vec![BigInt::zero(); rem.len() - b.len() + 1];
    for k in (0..quot.len()).rev() {
        let (q, r) = rem[k + b.len() - 1].div_rem(lead);
        if !r.is_zero() {
            return None;
        }
        for (i, c) in b.iter().enumerate() {
            rem[k + i] -= c * &q;
        }
        quot[k] = q;
    }
    rem.iter().all(Zero::is_zero).then(|| trim(quot))
}

/// `lc(b)^(deg a - deg b + 1) * a mod b`.
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut rem = a.to_vec();
    let lead = b.last().expect("nonzero divisor");
    while rem.len() >= b.len() {
        let top = rem.last().expect("nonempty").clone();
        let shift = rem.len() - b.len();
        for c in rem.iter_mut() {
            *c *= lead;
        }
        for (i, c) in b.iter().enumerate() {
            rem[shift + i] -= c * &top;
        }
        rem = trim(rem);
    }
    rem
}

fn primitive(a: &[BigInt]) -> Vec<BigInt> {
    let c = integer_content(a);
    a.iter().map(|x| x / &c).collect()
}

/// Gcd in `Z[x]` with positive leading coefficient, by the primitive
/// remainder sequence.
pub(crate) fn gcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() {
        return normalise(b.to_vec());
    }
    if b.is_empty() {
        return normalise(a.to_vec());
    }
    let content = integer_content(a).gcd(&integer_content(b));
    let (mut p, mut q) = (primitive(a), primitive(b));
    if p.len() < q.len() {
        std::mem::swap(&mut p, &mut q);
    }
    while !q.is_empty() {
        let r = pseudo_rem(&p, &q);
        p = q;
        q = if r.is_empty() { r } else { primitive(&r) };
    }
    normalise(p.iter().map(|c| c * &content).collect())
}

fn normalise(p: Vec<BigInt>) -> Vec<BigInt> {
    if p.last().is_some_and(Signed::is_negative) {
        p.into_iter().map(|c| -c).collect()
    } else {
        p
    }
}

pub(crate) fn mul_rational(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

pub(crate) fn sub_rational(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let len = a.len().max(b.len());
    trim((0..len).map(|i| a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default()).collect())
}

/// Exact quotient in `Q[x]`, or `None` when the remainder is nonzero.
pub(crate) fn div_exact_rational(a: &[BigRational], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let lead = b.last()?;
    if a.len() < b.len() {
        return a.is_empty().then(Vec::new);
    }
    let mut rem = a.to_vec();
    let mut quot = vec![BigRational::zero(); a.len() - b.len() + 1];
    for k in (0..quot.len()).rev() {
        let q = &rem[k + b.len() - 1] / lead;
        for (i, c) in b.iter().enumerate() {
            rem[k + i] -= c * &q;
        }
        quot[k] = q;
    }
    rem.iter().all(Zero::is_zero).then(|| trim(quot))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(c: &[i64]) -> Vec<BigInt> {
        trim(c.iter().map(|&v| BigInt::from(v)).collect())
    }

    #[test]
    fn gcd_and_division() {
        // (x - 1)(x + 2) and (x - 1)(2x + 3), both times 6
        let a = mul(&z(&[-1, 1]), &z(&[12, 6]));
        let b = mul(&z(&[-1, 1]), &z(&[18, 12]));
        assert_eq!(gcd(&a, &b), z(&[-6, 6]));
        assert_eq!(div_exact(&a, &z(&[-6, 6])), Some(z(&[2, 1])));
        assert_eq!(div_exact(&a, &z(&[0, 1])), None);
        assert_eq!(gcd(&[], &z(&[0, -3])), z(&[0, 3]));
        assert_eq!(gcd(&z(&[1, 1]), &z(&[1, 2])), z(&[1]));
    }
}
