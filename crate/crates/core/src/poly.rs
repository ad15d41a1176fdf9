//! Dense univariate polynomials and cyclotomic polynomials.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::scalar::Scalar;

/// Dense polynomial, coefficients stored from degree 0 upward.
///
/// The coefficient vector never ends in a zero; the zero polynomial is the
/// empty vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^k`
    pub fn monomial(c: T, k: usize) -> Self {
        let mut coeffs = vec![T::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    /// Euclidean division `self = q * divisor + r` with `deg r < deg divisor`.
    ///
    /// Panics if `divisor` is zero. Exact whenever the leading coefficient of
    /// the divisor is a unit of `T`.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let d = divisor.degree().expect("polynomial division by zero");
        let lead = divisor.coeffs[d].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![T::zero(); rem.len() - d];
        for k in (d..rem.len()).rev() {
            let c = rem[k].clone() / lead.clone();
            if c.is_zero() {
                continue;
            }
            for (j, b) in divisor.coeffs.iter().enumerate() {
                let idx = k - d + j;
                rem[idx] = rem[idx].clone() - c.clone() * b.clone();
            }
            quot[k - d] = c;
        }
        rem.truncate(d);
        (Self::new(quot), Self::new(rem))
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).1
    }

    /// Extended Euclid over a field: returns `(g, s, t)` with
    /// `s*a + t*b = g`, where `g` is a gcd (not normalized).
    pub fn ext_gcd(a: &Self, b: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Self::constant(T::one()), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::constant(T::one()));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s2 = s0.sub(&q.mul(&s1));
            let t2 = t0.sub(&q.mul(&t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        (r0, s0, t0)
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*x")?,
                _ => write!(f, "{c}*x^{k}")?,
            }
        }
        Ok(())
    }
}

fn cache() -> &'static Mutex<HashMap<u64, Arc<Poly<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Poly<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The n-th cyclotomic polynomial, computed as
/// `(x^n - 1) / prod_{d | n, d < n} Phi_d`. Results are memoized.
///
/// Panics if `n == 0`.
pub fn cyclotomic_polynomial(n: u64) -> Arc<Poly<i64>> {
    assert!(n >= 1, "cyclotomic polynomial of order 0");
    if let Some(p) = cache().lock().unwrap().get(&n) {
        return p.clone();
    }
    let mut num = Poly::monomial(1i64, n as usize).sub(&Poly::constant(1));
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        let phi_d = cyclotomic_polynomial(d);
        let (q, r) = num.div_rem(&phi_d);
        debug_assert!(r.is_zero());
        num = q;
    }
    let p = Arc::new(num);
    cache().lock().unwrap().insert(n, p.clone());
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};
    use crate::Rational;

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic_polynomial(1).coeffs(), &[-1, 1]);
        assert_eq!(cyclotomic_polynomial(2).coeffs(), &[1, 1]);
        assert_eq!(cyclotomic_polynomial(4).coeffs(), &[1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(8).coeffs(), &[1, 0, 0, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6).coeffs(), &[1, -1, 1]);
        // Phi_105 is the first with a coefficient outside {-1, 0, 1}
        assert!(cyclotomic_polynomial(105).coeffs().contains(&-2));
    }

    #[test]
    fn cyclotomic_oracle_by_recursive_division() {
        // independent route: divide x^4 - 1 by (x - 1)(x + 1) by hand-rolled
        // synthetic division and compare
        let x4m1: Poly<i64> = Poly::new(vec![-1, 0, 0, 0, 1]);
        let (q1, r1) = x4m1.div_rem(&Poly::new(vec![-1, 1]));
        let (q2, r2) = q1.div_rem(&Poly::new(vec![1, 1]));
        assert!(r1.is_zero() && r2.is_zero());
        assert_eq!(&q2, cyclotomic_polynomial(4).as_ref());

        let x8m1: Poly<i64> = Poly::monomial(1, 8).sub(&Poly::constant(1));
        let (q, r) = x8m1.div_rem(&Poly::monomial(1, 4).sub(&Poly::constant(1)));
        assert!(r.is_zero());
        assert_eq!(&q, cyclotomic_polynomial(8).as_ref());
    }

    #[test]
    fn degrees_match_totient() {
        for n in 1..=60 {
            let p = cyclotomic_polynomial(n);
            assert_eq!(p.degree().unwrap() as u64, crate::scalar::euler_phi(n));
            assert_eq!(*p.leading().unwrap(), 1);
        }
    }

    #[test]
    fn ext_gcd_inverts_mod_irreducible() {
        let m: Poly<Rational> = Poly::new(vec![int(1), int(0), int(1)]);
        let a: Poly<Rational> = Poly::new(vec![int(2), int(3)]);
        let (g, s, _) = Poly::ext_gcd(&a, &m);
        assert_eq!(g.degree(), Some(0));
        let inv = s.scale(&(int(1) / g.coeff(0)));
        assert_eq!(a.mul(&inv).rem(&m), Poly::constant(int(1)));
    }

    #[test]
    fn eval_horner() {
        let p: Poly<Rational> = Poly::new(vec![int(1), int(0), ratio(1, 2)]);
        assert_eq!(p.eval(&int(2)), int(3));
    }
}
