//! Exact arithmetic in cyclotomic fields Q(zeta_n).
//!
//! An element of conductor `n` is stored by its coordinates in the power basis
//! `1, zeta, ..., zeta^(phi(n)-1)` modulo the n-th cyclotomic polynomial, so
//! equality of normal forms is equality of field elements. Binary operations
//! between different conductors first embed both operands in the field of
//! conductor `lcm(n, m)` via `zeta_n = zeta_lcm^(lcm/n)`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use thiserror::Error;

use crate::poly::{cyclotomic_polynomial, Poly};
use crate::scalar::{euler_phi, lcm_u64, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CyclotomicError {
    #[error("value is not rational (conductor {conductor})")]
    NotRational { conductor: u64 },
    #[error("conductor must be positive")]
    ZeroConductor,
    #[error("expected {expected} coefficients for conductor {conductor}, found {found}")]
    WrongLength {
        conductor: u64,
        expected: usize,
        found: usize,
    },
}

/// Element of Q(zeta_n) over the scalar type `T`.
#[derive(Clone, Debug)]
pub struct Cyclotomic<T> {
    conductor: u64,
    coeffs: Vec<T>,
}

fn modulus<T: Scalar>(n: u64) -> Poly<T> {
    cyclotomic_polynomial(n).map(|&c| T::from_int(c))
}

impl<T: Scalar> Cyclotomic<T> {
    /// Builds an element from power-basis coordinates of length `phi(n)`.
    pub fn from_coeffs(conductor: u64, coeffs: Vec<T>) -> Result<Self, CyclotomicError> {
        if conductor == 0 {
            return Err(CyclotomicError::ZeroConductor);
        }
        let expected = euler_phi(conductor) as usize;
        if coeffs.len() != expected {
            return Err(CyclotomicError::WrongLength {
                conductor,
                expected,
                found: coeffs.len(),
            });
        }
        Ok(Self { conductor, coeffs })
    }

    /// Reduces `sum_k c_k zeta_n^k` (any length) to normal form.
    pub fn from_poly(conductor: u64, p: &Poly<T>) -> Self {
        assert!(conductor >= 1, "conductor must be positive");
        let phi = euler_phi(conductor) as usize;
        let r = p.rem(&modulus(conductor));
        let mut coeffs = r.into_coeffs();
        coeffs.resize(phi, T::zero());
        Self { conductor, coeffs }
    }

    pub fn from_scalar(c: T) -> Self {
        Self {
            conductor: 1,
            coeffs: vec![c],
        }
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_scalar(T::from_int(v))
    }

    pub fn zero() -> Self {
        Self::from_scalar(T::zero())
    }

    pub fn one() -> Self {
        Self::from_scalar(T::one())
    }

    /// `zeta_n^k`, exponent taken mod `n`.
    pub fn root_of_unity(n: u64, k: i64) -> Self {
        assert!(n >= 1, "root of unity of order 0");
        let e = k.rem_euclid(n as i64) as usize;
        Self::from_poly(n, &Poly::monomial(T::one(), e))
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn as_poly(&self) -> Poly<T> {
        Poly::new(self.coeffs.clone())
    }

    /// Embeds into Q(zeta_m). Panics unless the conductor divides `m`.
    pub fn promote(&self, m: u64) -> Self {
        assert!(
            m.is_multiple_of(self.conductor),
            "cannot embed conductor {} into {}",
            self.conductor,
            m
        );
        if m == self.conductor {
            return self.clone();
        }
        let step = (m / self.conductor) as usize;
        let mut spread = vec![T::zero(); (self.coeffs.len().max(1) - 1) * step + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            spread[k * step] = c.clone();
        }
        Self::from_poly(m, &Poly::new(spread))
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        let m = lcm_u64(self.conductor, other.conductor);
        (self.promote(m), other.promote(m))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        let (a, b) = self.aligned(other);
        let coeffs = a
            .coeffs
            .into_iter()
            .zip(b.coeffs)
            .map(|(x, y)| f(x, y))
            .collect();
        Self {
            conductor: a.conductor,
            coeffs,
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        Self {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    /// Complex conjugation, the automorphism `zeta -> zeta^-1`.
    pub fn conj(&self) -> Self {
        let n = self.conductor as usize;
        let mut p = vec![T::zero(); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            let e = (n - k % n) % n;
            p[e] = p[e].clone() + c.clone();
        }
        Self::from_poly(self.conductor, &Poly::new(p))
    }

    /// `(x + conj(x)) / 2`
    pub fn real_part(&self) -> Self {
        let two = T::from_int(2);
        (self.clone() + self.conj()).scale(&(T::one() / two))
    }

    /// The value as a scalar when the element lies in Q.
    pub fn to_scalar(&self) -> Result<T, CyclotomicError> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Ok(self.coeffs[0].clone())
        } else {
            Err(CyclotomicError::NotRational {
                conductor: self.conductor,
            })
        }
    }

    /// Multiplicative inverse via extended Euclid against Phi_n; `None` for 0.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let (g, s, _) = Poly::ext_gcd(&self.as_poly(), &modulus(self.conductor));
        // Phi_n is irreducible, so the gcd is a nonzero constant
        debug_assert_eq!(g.degree(), Some(0));
        let g0 = g.coeff(0);
        Some(Self::from_poly(self.conductor, &s.scale(&(T::one() / g0))))
    }

    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|inv| self.clone() * inv)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }

    /// Re-expresses the element over the smallest conductor that contains it
    /// among the divisors of the current one.
    pub fn simplify(&self) -> Self {
        let n = self.conductor;
        for d in (1..=n).filter(|d| n.is_multiple_of(*d)) {
            if d == n {
                break;
            }
            if let Some(x) = self.descend(d) {
                return x;
            }
        }
        self.clone()
    }

    fn descend(&self, d: u64) -> Option<Self> {
        // Q(zeta_d) sits inside Q(zeta_n) as the span of promote(zeta_d^k), k < phi(d)
        let phi_d = euler_phi(d) as usize;
        let basis: Vec<Vec<T>> = (0..phi_d)
            .map(|k| {
                Self::root_of_unity(d, k as i64)
                    .promote(self.conductor)
                    .coeffs
            })
            .collect();
        let sol = solve_in_span(&basis, &self.coeffs)?;
        Some(Self {
            conductor: d,
            coeffs: sol,
        })
    }

    /// Evaluates numerically at `zeta_n = exp(2 pi i / n)`; display only.
    pub fn approx(&self, to_f64: impl Fn(&T) -> f64) -> (f64, f64) {
        let n = self.conductor as f64;
        self.coeffs
            .iter()
            .enumerate()
            .fold((0.0, 0.0), |(re, im), (k, c)| {
                let angle = 2.0 * std::f64::consts::PI * k as f64 / n;
                let v = to_f64(c);
                (re + v * angle.cos(), im + v * angle.sin())
            })
    }
}

/// Finds `x` with `sum_k x_k * basis[k] == target`, if any.
fn solve_in_span<T: Scalar>(basis: &[Vec<T>], target: &[T]) -> Option<Vec<T>> {
    let rows = target.len();
    let cols = basis.len();
    // augmented matrix, one row per target coordinate
    let mut m: Vec<Vec<T>> = (0..rows)
        .map(|i| {
            let mut row: Vec<T> = basis.iter().map(|b| b[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let lead = m[r][c].clone();
        for v in m[r].iter_mut() {
            *v = v.clone() / lead.clone();
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=cols {
                    m[i][j] = m[i][j].clone() - f.clone() * m[r][j].clone();
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![T::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][cols].clone();
    }
    Some(x)
}

impl<T: Scalar> PartialEq for Cyclotomic<T> {
    fn eq(&self, other: &Self) -> bool {
        if self.conductor == other.conductor {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = self.aligned(other);
        a.coeffs == b.coeffs
    }
}

impl<T: Scalar> Add for Cyclotomic<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.zip_with(&rhs, |a, b| a + b)
    }
}

impl<T: Scalar> Sub for Cyclotomic<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.zip_with(&rhs, |a, b| a - b)
    }
}

impl<T: Scalar> Neg for Cyclotomic<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            conductor: self.conductor,
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl<T: Scalar> Mul for Cyclotomic<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = self.aligned(&rhs);
        let prod = a.as_poly().mul(&b.as_poly());
        Self::from_poly(a.conductor, &prod)
    }
}

impl<T: Scalar> Div for Cyclotomic<T> {
    type Output = Self;
    /// Panics on division by zero.
    fn div(self, rhs: Self) -> Self {
        self.checked_div(&rhs).expect("cyclotomic division by zero")
    }
}

impl<'a, T: Scalar> Add<&'a Cyclotomic<T>> for &'a Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn add(self, rhs: Self) -> Cyclotomic<T> {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<'a, T: Scalar> Sub<&'a Cyclotomic<T>> for &'a Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn sub(self, rhs: Self) -> Cyclotomic<T> {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl<'a, T: Scalar> Mul<&'a Cyclotomic<T>> for &'a Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn mul(self, rhs: Self) -> Cyclotomic<T> {
        self.clone() * rhs.clone()
    }
}

impl<T: Scalar> std::iter::Sum for Cyclotomic<T> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, x| acc + x)
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for Cyclotomic<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*z{}", self.conductor)?,
                _ => write!(f, "({c})*z{}^{k}", self.conductor)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `sum_{k=1}^{n-1} 1 / (1 - Re zeta_n^k)`, evaluated exactly in Q(zeta_n).
pub fn inverse_cosine_gap_sum<T: Scalar>(n: u64) -> Cyclotomic<T> {
    (1..n as i64)
        .map(|k| {
            let gap = Cyclotomic::one() - Cyclotomic::<T>::root_of_unity(n, k).real_part();
            gap.inv()
                .expect("1 - Re(zeta^k) vanishes only for k = 0 mod n")
        })
        .sum()
}
