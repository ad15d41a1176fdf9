//! Scalar abstraction shared by the polynomial, cyclotomic and Gaussian layers.
//!
//! Everything in this crate that does not depend on a particular number type
//! is written against [`Scalar`]. Exact computations instantiate it with
//! [`Rational`](crate::Rational); `f64` also satisfies the bounds and is only
//! used for display approximations.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Zero};

/// Numeric types usable as coefficients.
///
/// Division is only required to be exact for field types; integer
/// instantiations are fine as long as every divisor is a unit.
pub trait Scalar: Clone + Debug + PartialEq + Num + Neg<Output = Self> + FromPrimitive {
    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("scalar type cannot represent i64")
    }
}

impl<T> Scalar for T where T: Clone + Debug + PartialEq + Num + Neg<Output = T> + FromPrimitive {}

/// Builds `num/den` as a reduced big rational. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Returns the integer value of `q` if it has denominator 1.
pub fn to_integer(q: &BigRational) -> Option<BigInt> {
    q.is_integer().then(|| q.to_integer())
}

/// Integer value of `q` when it fits in an `i64`.
pub fn to_i64(q: &BigRational) -> Option<i64> {
    use num_traits::ToPrimitive;
    to_integer(q).and_then(|z| z.to_i64())
}

/// Canonical text form: `p/q`, or `p` when the denominator is 1.
pub fn render_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p`, `p/q` (either sign on `p`, whitespace tolerated).
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str_radix(num, 10).ok()?;
    let den = BigInt::from_str_radix(den, 10).ok()?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

/// Decimal approximation, display only.
pub fn approx_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// gcd of a list; 0 for an empty or all-zero list.
pub fn gcd_all(values: impl IntoIterator<Item = i64>) -> i64 {
    values.into_iter().fold(0, |g, v| g.gcd(&v))
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

pub fn euler_phi(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_and_parse() {
        assert_eq!(render_rational(&ratio(24, 8)), "3");
        assert_eq!(render_rational(&ratio(63, 6)), "21/2");
        assert_eq!(render_rational(&ratio(-1, 2)), "-1/2");
        assert_eq!(parse_rational("21/2"), Some(ratio(21, 2)));
        assert_eq!(parse_rational(" -4 "), Some(int(-4)));
        assert_eq!(parse_rational("6/4"), Some(ratio(3, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn totient() {
        let expected = [1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4];
        for (n, phi) in (1..=12).zip(expected) {
            assert_eq!(euler_phi(n), phi, "phi({n})");
        }
        assert_eq!(euler_phi(840), 192);
    }

    #[test]
    fn gcds() {
        assert_eq!(gcd_all([2, 4, 6]), 2);
        assert_eq!(gcd_all([0, 0]), 0);
        assert_eq!(gcd_all([0, -3]), 3);
    }
}
