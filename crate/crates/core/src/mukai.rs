//! Mukai calculus on the numerical Chow ring `R(X) = Z + Pic(X) + Z` of a
//! polarized K3 surface.
//!
//! A class is stored by its Mukai vector `(r, c1, s)` where `s = r + ch2`.
//! The Mukai pairing is `<v, w> = v.r * w.s - v.c1 . w.c1 + v.s * w.r`, and
//! on a K3 the Euler pairing agrees with it.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{is_primitive, LatticeError, LatticeVector, PicLattice};
use crate::scalar::{gcd_all, int, ratio};
use crate::{wire, GaussianRational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MukaiError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("s = r + ch2 = {0} is not an integer")]
    NonIntegralMukai(String),
    #[error("invalid K3 surface: {0}")]
    InvalidSurface(String),
    #[error("cannot reduce the zero polynomial")]
    ZeroPolynomial,
    #[error("reduced polynomials of degrees {left} and {right} are not comparable")]
    IncomparableDimensions { left: usize, right: usize },
}

/// Mukai vector `(r, c1, s)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MukaiVector {
    pub r: i64,
    pub c1: LatticeVector,
    pub s: i64,
}

impl MukaiVector {
    pub fn new(r: i64, c1: impl Into<LatticeVector>, s: i64) -> Self {
        Self {
            r,
            c1: c1.into(),
            s,
        }
    }

    /// `v(E) = (rk, ch1, rk + ch2)`; fails unless `rk + ch2` is an integer.
    pub fn from_chern(
        r: i64,
        c1: impl Into<LatticeVector>,
        ch2: &Rational,
    ) -> Result<Self, MukaiError> {
        let s = int(r) + ch2;
        if !s.is_integer() {
            return Err(MukaiError::NonIntegralMukai(
                crate::scalar::render_rational(&s),
            ));
        }
        let s =
            crate::scalar::to_i64(&s).ok_or_else(|| MukaiError::NonIntegralMukai(s.to_string()))?;
        Ok(Self::new(r, c1, s))
    }

    /// Structure sheaf `O_X`: `(1, 0, 1)`.
    pub fn structure_sheaf(rank: usize) -> Self {
        Self::new(1, LatticeVector::zero(rank), 1)
    }

    /// Skyscraper sheaf of a point: `(0, 0, 1)`.
    pub fn point(rank: usize) -> Self {
        Self::new(0, LatticeVector::zero(rank), 1)
    }

    /// `v^∨ = (r, -c1, s)`
    pub fn involution(&self) -> Self {
        Self::new(self.r, self.c1.neg(), self.s)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.r + other.r, self.c1.add(&other.c1), self.s + other.s)
    }

    pub fn scaled(&self, k: i64) -> Self {
        Self::new(self.r * k, self.c1.scaled(k), self.s * k)
    }

    /// `ch2 = s - r`
    pub fn ch2(&self) -> i64 {
        self.s - self.r
    }

    /// Primitive as an element of `Z + Pic + Z`.
    pub fn is_primitive(&self) -> bool {
        let mut coords = vec![self.r, self.s];
        coords.extend_from_slice(&self.c1.0);
        is_primitive(&LatticeVector(coords))
    }
}

impl fmt::Display for MukaiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {:?}, {})", self.r, self.c1.0, self.s)
    }
}

/// Slope `d / r`, infinite for rank zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Slope {
    Finite(Rational),
    Infinite,
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::Finite(q) => write!(f, "{}", crate::scalar::render_rational(q)),
            Slope::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Slope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeRankSlope {
    pub degree: i64,
    pub rank: i64,
    pub slope: Slope,
}

/// Hilbert polynomial `c2 z^2 + c1 z + c0` of a class on a K3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertPoly {
    pub c2: Rational,
    pub c1: Rational,
    pub c0: Rational,
}

impl HilbertPoly {
    pub fn new(c2: Rational, c1: Rational, c0: Rational) -> Self {
        Self { c2, c1, c0 }
    }

    /// Coefficients from degree 2 down.
    pub fn coeffs(&self) -> [&Rational; 3] {
        [&self.c2, &self.c1, &self.c0]
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs()
            .iter()
            .position(|c| !c.is_zero())
            .map(|i| 2 - i)
    }

    pub fn eval(&self, z: &Rational) -> Rational {
        (&self.c2 * z + &self.c1) * z + &self.c0
    }

    /// Divides by the leading coefficient.
    pub fn reduced(&self) -> Result<HilbertPoly, MukaiError> {
        let d = self.degree().ok_or(MukaiError::ZeroPolynomial)?;
        let lead = self.coeffs()[2 - d].clone();
        Ok(HilbertPoly::new(
            &self.c2 / &lead,
            &self.c1 / &lead,
            &self.c0 / &lead,
        ))
    }
}

impl Serialize for HilbertPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct W<'a> {
            #[serde(with = "wire::rational_vec")]
            coeffs: &'a [Rational],
        }
        W {
            coeffs: &[self.c2.clone(), self.c1.clone(), self.c0.clone()],
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HilbertPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct W {
            #[serde(with = "wire::rational_vec")]
            coeffs: Vec<Rational>,
        }
        let w = W::deserialize(d)?;
        let [c2, c1, c0]: [Rational; 3] = w
            .coeffs
            .try_into()
            .map_err(|_| serde::de::Error::custom("expected three coefficients"))?;
        Ok(HilbertPoly::new(c2, c1, c0))
    }
}

/// Orders two polynomials by their monic reductions for `z >> 0`.
///
/// Only polynomials of equal degree are compared.
pub fn compare_reduced(p: &HilbertPoly, q: &HilbertPoly) -> Result<Ordering, MukaiError> {
    let (dp, dq) = (
        p.degree().ok_or(MukaiError::ZeroPolynomial)?,
        q.degree().ok_or(MukaiError::ZeroPolynomial)?,
    );
    if dp != dq {
        return Err(MukaiError::IncomparableDimensions {
            left: dp,
            right: dq,
        });
    }
    let (p, q) = (p.reduced()?, q.reduced()?);
    for (a, b) in p.coeffs().into_iter().zip(q.coeffs()) {
        match a.cmp(b) {
            Ordering::Equal => continue,
            other => return Ok(other),
        }
    }
    Ok(Ordering::Equal)
}

/// Element `(a0, a1, a2)` of `R(X)_C` with Gaussian-rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComplexChowVector {
    pub a0: GaussianRational,
    pub a1: Vec<GaussianRational>,
    pub a2: GaussianRational,
}

/// Sign of the imaginary part in `exp(beta ± i omega)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpSign {
    Plus,
    Minus,
}

/// A K3 surface through its Picard lattice and an ample class `h`.
///
/// The Todd class is `(1, 0, 2)`; ampleness of `h` is asserted by the caller,
/// only `h^2 > 0` (and even) is checked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "K3SurfaceWire", into = "K3SurfaceWire")]
pub struct K3Surface {
    picard: PicLattice,
    ample: LatticeVector,
}

#[derive(Serialize, Deserialize)]
struct K3SurfaceWire {
    gram: Vec<Vec<i64>>,
    ample: Vec<i64>,
}

impl TryFrom<K3SurfaceWire> for K3Surface {
    type Error = MukaiError;
    fn try_from(w: K3SurfaceWire) -> Result<Self, MukaiError> {
        K3Surface::new(PicLattice::new(w.gram)?, LatticeVector(w.ample))
    }
}

impl From<K3Surface> for K3SurfaceWire {
    fn from(x: K3Surface) -> Self {
        K3SurfaceWire {
            gram: x.picard.gram().to_vec(),
            ample: x.ample.0,
        }
    }
}

impl K3Surface {
    pub fn new(picard: PicLattice, ample: LatticeVector) -> Result<Self, MukaiError> {
        if !picard.is_even() {
            return Err(MukaiError::InvalidSurface(
                "Picard lattice of a K3 surface is even".into(),
            ));
        }
        let h2 = picard.inner(&ample, &ample)?;
        if h2 < 2 {
            return Err(MukaiError::InvalidSurface(format!(
                "ample class must satisfy h^2 >= 2, got {h2}"
            )));
        }
        Ok(Self { picard, ample })
    }

    /// Picard rank one with `h^2 = d`.
    pub fn rank_one(d: i64) -> Result<Self, MukaiError> {
        Self::new(PicLattice::rank_one(d), LatticeVector(vec![1]))
    }

    pub fn picard(&self) -> &PicLattice {
        &self.picard
    }

    pub fn ample(&self) -> &LatticeVector {
        &self.ample
    }

    pub fn picard_rank(&self) -> usize {
        self.picard.rank()
    }

    /// `deg(H) = h^2`
    pub fn degree_of_polarization(&self) -> i64 {
        self.picard
            .inner(&self.ample, &self.ample)
            .expect("validated at construction")
    }

    fn check(&self, v: &MukaiVector) -> Result<(), MukaiError> {
        if v.c1.len() != self.picard_rank() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.picard_rank(),
                found: v.c1.len(),
            }
            .into());
        }
        Ok(())
    }

    pub fn mukai_pairing(&self, v: &MukaiVector, w: &MukaiVector) -> Result<i64, MukaiError> {
        self.check(v)?;
        self.check(w)?;
        Ok(v.r * w.s - self.picard.inner(&v.c1, &w.c1)? + v.s * w.r)
    }

    /// `chi(x, y)`; equal to the Mukai pairing on a K3 surface.
    pub fn euler_pairing(&self, x: &MukaiVector, y: &MukaiVector) -> Result<i64, MukaiError> {
        self.mukai_pairing(x, y)
    }

    /// Line bundle with first Chern class `c`: `(1, c, 1 + c^2/2)`.
    pub fn line_bundle(&self, c: &LatticeVector) -> Result<MukaiVector, MukaiError> {
        let c2 = self.picard.inner(c, c)?;
        Ok(MukaiVector::new(1, c.clone(), 1 + c2 / 2))
    }

    /// `v * ch(L)` for the line bundle `L` with `c1(L) = c`.
    pub fn twist(&self, v: &MukaiVector, c: &LatticeVector) -> Result<MukaiVector, MukaiError> {
        self.check(v)?;
        let cc = self.picard.inner(c, c)?;
        let c1c = self.picard.inner(&v.c1, c)?;
        Ok(MukaiVector::new(
            v.r,
            v.c1.add(&c.scaled(v.r)),
            v.s + c1c + v.r * cc / 2,
        ))
    }

    /// `deg(v) = c1 . h`
    pub fn degree(&self, v: &MukaiVector) -> Result<i64, MukaiError> {
        self.check(v)?;
        Ok(self.picard.inner(&v.c1, &self.ample)?)
    }

    /// Degree against an arbitrary rational polarization `omega`, or `h`.
    pub fn degree_with(
        &self,
        v: &MukaiVector,
        omega: Option<&[Rational]>,
    ) -> Result<Rational, MukaiError> {
        match omega {
            None => Ok(int(self.degree(v)?)),
            Some(w) => {
                self.check(v)?;
                Ok(self.picard.inner_with(&v.c1.to_scalars::<Rational>(), w)?)
            }
        }
    }

    pub fn slope_with(
        &self,
        v: &MukaiVector,
        omega: Option<&[Rational]>,
    ) -> Result<Slope, MukaiError> {
        let d = self.degree_with(v, omega)?;
        Ok(if v.r == 0 {
            Slope::Infinite
        } else {
            Slope::Finite(d / int(v.r))
        })
    }

    pub fn degree_rank_slope(&self, v: &MukaiVector) -> Result<DegreeRankSlope, MukaiError> {
        let degree = self.degree(v)?;
        let slope = if v.r == 0 {
            Slope::Infinite
        } else {
            Slope::Finite(ratio(degree, v.r))
        };
        Ok(DegreeRankSlope {
            degree,
            rank: v.r,
            slope,
        })
    }

    /// `P(m) = chi(v * ch(H^m)) = (r h^2 / 2) m^2 + d m + (r + s)`.
    pub fn hilbert_polynomial(&self, v: &MukaiVector) -> Result<HilbertPoly, MukaiError> {
        let d = self.degree(v)?;
        let h2 = self.degree_of_polarization();
        Ok(HilbertPoly::new(ratio(v.r * h2, 2), int(d), int(v.r + v.s)))
    }

    /// `exp(beta ± i omega) = (1, beta ± i omega, (beta ± i omega)^2 / 2)`.
    pub fn exp_class(
        &self,
        beta: &[Rational],
        omega: &[Rational],
        sign: ExpSign,
    ) -> Result<ComplexChowVector, MukaiError> {
        let bb = self.picard.inner_with(beta, beta)?;
        let ww = self.picard.inner_with(omega, omega)?;
        let bw = self.picard.inner_with(beta, omega)?;
        let sgn = match sign {
            ExpSign::Plus => Rational::one(),
            ExpSign::Minus => -Rational::one(),
        };
        let half = ratio(1, 2);
        let a1 = beta
            .iter()
            .zip(omega)
            .map(|(b, w)| GaussianRational::new(b.clone(), w * &sgn))
            .collect();
        // (b + s i w)^2 = b^2 - w^2 + 2 s i (b.w)
        let a2 = GaussianRational::new((bb - ww) * &half, bw * sgn);
        Ok(ComplexChowVector {
            a0: GaussianRational::one(),
            a1,
            a2,
        })
    }

    /// gcd(r, d) and gcd(r, d, s) for the given class.
    pub fn gcds(&self, v: &MukaiVector) -> Result<(i64, i64), MukaiError> {
        let d = self.degree(v)?;
        Ok((gcd_all([v.r, d]), gcd_all([v.r, d, v.s])))
    }
}
