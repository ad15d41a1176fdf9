//! Stability-side computations: Gieseker/slope reports, Bridgeland central
//! charges `Z_{beta,omega}`, and the hypothesis checker for moduli on `[X/G]`.
//!
//! Nothing here decides whether an actual object is stable; only numerical
//! shadows are produced.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::LatticeVector;
use crate::mukai::{
    DegreeRankSlope, ExpSign, HilbertPoly, K3Surface, MukaiError, MukaiVector, Slope,
};
use crate::orbifold::{
    moduli_dimension, numerical_pullback, GroupFixedData, OrbMukaiVector, OrbifoldError,
};
use crate::scalar::{int, ratio};
use crate::{GaussianRational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StabilityError {
    #[error(transparent)]
    Mukai(#[from] MukaiError),
    #[error(transparent)]
    Orbifold(#[from] OrbifoldError),
    #[error("{0} is not in the upper half plane or on the negative real axis")]
    NotStabilityValue(String),
    #[error("moduli dimension {0} is odd")]
    OddDimension(i64),
    #[error("moduli dimension {0} is negative")]
    NegativeDimension(i64),
    #[error("invalid Bridgeland family: {0}")]
    InvalidFamily(String),
}

/// `(beta, omega)` in `NS(X)_Q`; ampleness of `omega` is a caller assertion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChargeParams {
    #[serde(with = "crate::wire::rational_vec")]
    pub beta: Vec<Rational>,
    #[serde(with = "crate::wire::rational_vec")]
    pub omega: Vec<Rational>,
    #[serde(default)]
    pub omega_ample_asserted: bool,
}

impl ChargeParams {
    pub fn new(beta: Vec<Rational>, omega: Vec<Rational>, omega_ample_asserted: bool) -> Self {
        Self {
            beta,
            omega,
            omega_ample_asserted,
        }
    }

    /// `beta = b h`, `omega = t h` for the ample class `h` of `x`.
    pub fn along_ample(
        x: &K3Surface,
        b: Rational,
        t: Rational,
        omega_ample_asserted: bool,
    ) -> Self {
        let h = x.ample().to_scalars::<Rational>();
        Self {
            beta: h.iter().map(|c| c * &b).collect(),
            omega: h.iter().map(|c| c * &t).collect(),
            omega_ample_asserted,
        }
    }

    /// `deg(omega^2)`
    pub fn omega_square(&self, x: &K3Surface) -> Result<Rational, StabilityError> {
        Ok(x.picard()
            .inner_with(&self.omega, &self.omega)
            .map_err(MukaiError::from)?)
    }
}

/// `Z(v) = -<exp(beta - i omega), v>` with the first slot conjugated, i.e.
/// `-[e0 s - e1.c1 + e2 r]` for `e = exp(beta + i omega)`.
pub fn central_charge(
    params: &ChargeParams,
    v: &MukaiVector,
    x: &K3Surface,
) -> Result<GaussianRational, StabilityError> {
    let e = x.exp_class(&params.beta, &params.omega, ExpSign::Plus)?;
    let c1 = v.c1.to_scalars::<Rational>();
    if c1.len() != e.a1.len() {
        return Err(
            MukaiError::from(crate::lattice::LatticeError::DimensionMismatch {
                expected: e.a1.len(),
                found: c1.len(),
            })
            .into(),
        );
    }
    let re1: Vec<Rational> = e.a1.iter().map(|z| z.re.clone()).collect();
    let im1: Vec<Rational> = e.a1.iter().map(|z| z.im.clone()).collect();
    let pic = x.picard();
    let e1c1 = GaussianRational::new(
        pic.inner_with(&re1, &c1).map_err(MukaiError::from)?,
        pic.inner_with(&im1, &c1).map_err(MukaiError::from)?,
    );
    let inner = e.a0.scale(&int(v.s)) - e1c1 + e.a2.scale(&int(v.r));
    Ok(-inner)
}

/// True iff `z` lies in the strict upper half plane or on the negative real axis.
pub fn is_stability_value(z: &GaussianRational) -> bool {
    z.im.is_positive() || (z.im.is_zero() && z.re.is_negative())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PhaseKind {
    /// `theta = 1`
    NegativeReal,
    /// `theta = 1/2`
    PositiveImaginary,
    /// `0 < theta < 1/2`
    FirstQuadrant,
    /// `1/2 < theta < 1`
    SecondQuadrant,
}

/// Exact phase data of `z = m e^{i pi theta}`, `theta` in `(0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Phase {
    pub kind: PhaseKind,
    /// `theta` when it is one of the rational axis values.
    #[serde(with = "opt_rational")]
    pub theta: Option<Rational>,
    /// `tan(pi theta) = im / re` when `re != 0`.
    #[serde(with = "opt_rational")]
    pub tangent: Option<Rational>,
}

mod opt_rational {
    use serde::Serializer;

    use crate::scalar::render_rational;
    use crate::Rational;

    pub fn serialize<S: Serializer>(q: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match q {
            Some(q) => s.serialize_some(&render_rational(q)),
            None => s.serialize_none(),
        }
    }
}

pub fn phase(z: &GaussianRational) -> Result<Phase, StabilityError> {
    if !is_stability_value(z) {
        return Err(StabilityError::NotStabilityValue(z.to_string()));
    }
    let tangent = (!z.re.is_zero()).then(|| &z.im / &z.re);
    let (kind, theta) = if z.im.is_zero() {
        (PhaseKind::NegativeReal, Some(Rational::one()))
    } else if z.re.is_zero() {
        (PhaseKind::PositiveImaginary, Some(ratio(1, 2)))
    } else if z.re.is_positive() {
        (PhaseKind::FirstQuadrant, None)
    } else {
        (PhaseKind::SecondQuadrant, None)
    };
    Ok(Phase {
        kind,
        theta,
        tangent,
    })
}

/// Orders two stability values by phase.
pub fn compare_phase(
    a: &GaussianRational,
    b: &GaussianRational,
) -> Result<Ordering, StabilityError> {
    for z in [a, b] {
        if !is_stability_value(z) {
            return Err(StabilityError::NotStabilityValue(z.to_string()));
        }
    }
    // both arguments lie in (0, pi], where the sign of the cross product
    // a x b decides which one is larger
    let cross = &a.re * &b.im - &a.im * &b.re;
    Ok(Rational::zero().cmp(&cross))
}

/// True iff `omega` is asserted ample and `deg(omega^2) > 2`.
pub fn check_charge_params(params: &ChargeParams, x: &K3Surface) -> bool {
    params.omega_ample_asserted
        && params.beta.len() == x.picard_rank()
        && params.omega.len() == x.picard_rank()
        && params.omega_square(x).is_ok_and(|w2| w2 > int(2))
}

/// `Z~ = Z o p^N` on the quotient stack.
pub fn induced_central_charge(
    params: &ChargeParams,
    a: &OrbMukaiVector,
    x: &K3Surface,
) -> Result<GaussianRational, StabilityError> {
    central_charge(params, &numerical_pullback(a), x)
}

/// Parameters of `sigma_{bh, th}` for a class `v`, which requires `r > 0` and
/// `deg(H) b < mu(v)`.
pub fn bridgeland_family_params(
    b: i64,
    t: Rational,
    v: &MukaiVector,
    x: &K3Surface,
    omega_ample_asserted: bool,
) -> Result<ChargeParams, StabilityError> {
    if v.r <= 0 {
        return Err(StabilityError::InvalidFamily(format!(
            "rank must be positive, got {}",
            v.r
        )));
    }
    if !t.is_positive() {
        return Err(StabilityError::InvalidFamily("t must be positive".into()));
    }
    let mu = ratio(x.degree(v)?, v.r);
    let deg_b = int(x.degree_of_polarization() * b);
    if deg_b >= mu {
        return Err(StabilityError::InvalidFamily(format!(
            "deg(B) = {} is not below mu = {}",
            deg_b,
            crate::scalar::render_rational(&mu)
        )));
    }
    Ok(ChargeParams::along_ample(
        x,
        int(b),
        t,
        omega_ample_asserted,
    ))
}

/// Numerical stability data of a class on `X` polarized by `h`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GiesekerSlopeReport {
    pub rank: i64,
    pub degree: i64,
    pub slope: Slope,
    pub gcd_rd: i64,
    pub gcd_rds: i64,
    /// slope stability, slope semistability and Gieseker (semi)stability agree
    pub collapse_of_stability_notions: bool,
    /// semistable equals stable: `gcd(r, d, s) = 1`
    pub fine_moduli_condition: bool,
    /// rank one classes only have stable sheaves
    pub rank_one_shortcut: bool,
}

pub fn gieseker_slope_report(
    v: &MukaiVector,
    x: &K3Surface,
) -> Result<GiesekerSlopeReport, StabilityError> {
    let DegreeRankSlope {
        degree,
        rank,
        slope,
    } = x.degree_rank_slope(v)?;
    let (gcd_rd, gcd_rds) = x.gcds(v)?;
    Ok(GiesekerSlopeReport {
        rank,
        degree,
        slope,
        gcd_rd,
        gcd_rds,
        collapse_of_stability_notions: rank > 0 && gcd_rd == 1,
        fine_moduli_condition: gcd_rds == 1,
        rank_one_shortcut: rank == 1,
    })
}

/// Hilbert polynomial of the sheaf induced from `F` along `X -> [X/G]`:
/// `P_{S_G(F)} = |G| P_F`.
pub fn induced_hilbert_polynomial(
    v: &MukaiVector,
    x: &K3Surface,
    group_order: u64,
) -> Result<HilbertPoly, StabilityError> {
    let p = x.hilbert_polynomial(v)?;
    let n = int(group_order as i64);
    Ok(HilbertPoly::new(&p.c2 * &n, &p.c1 * &n, &p.c0 * &n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conclusion {
    /// `M = M^s`; if non-empty, irreducible symplectic of this dimension,
    /// deformation equivalent to `Hilb^{dim/2}(K3)`.
    MequalsMsIrreducibleSymplectic(i64),
    /// `M = M^s`, smooth projective when non-empty.
    MequalsMsOnly,
    ConditionsNotMet,
}

impl Conclusion {
    pub fn name(&self) -> &'static str {
        match self {
            Conclusion::MequalsMsIrreducibleSymplectic(_) => "MequalsMs_IrreducibleSymplectic",
            Conclusion::MequalsMsOnly => "MequalsMs_Only",
            Conclusion::ConditionsNotMet => "ConditionsNotMet",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NonEmptiness {
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HypothesisReport {
    pub rank_positive: bool,
    pub primitive: bool,
    pub degree_positive: bool,
    pub gcd_rd_one: bool,
    pub gcd_rds_one: bool,
    pub generic_asserted: bool,
    #[serde(serialize_with = "conclusion_name")]
    pub conclusion: Conclusion,
    pub dim: Option<i64>,
    pub deformation_type: Option<String>,
    pub summary: String,
    pub nonemptiness: NonEmptiness,
}

fn conclusion_name<S: serde::Serializer>(c: &Conclusion, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(c.name())
}

/// Evaluates the hypotheses of the main theorem for `a` on `[X/G]`.
///
/// `M = M^s` holds when `gcd(r, d, s) = 1` or `y` is primitive and `h` is
/// `y`-generic. The irreducible symplectic conclusion further needs `r > 0`,
/// `y` primitive, `h` generic, and `d > 0` or `gcd(r, d) = 1`.
pub fn check_main_theorem(
    a: &OrbMukaiVector,
    data: &GroupFixedData,
    x: &K3Surface,
    h_generic_asserted: bool,
) -> Result<HypothesisReport, StabilityError> {
    let y = numerical_pullback(a);
    let d = x.degree(&y)?;
    let (gcd_rd, gcd_rds) = x.gcds(&y)?;
    let rank_positive = y.r > 0;
    let primitive = y.is_primitive();
    let degree_positive = d > 0;
    let gcd_rd_one = gcd_rd == 1;
    let gcd_rds_one = gcd_rds == 1;

    let dim = match moduli_dimension(a, data, x) {
        Ok(dim) => dim,
        Err(OrbifoldError::OddDimension(dim)) => return Err(StabilityError::OddDimension(dim)),
        Err(e) => return Err(e.into()),
    };

    let theorem =
        rank_positive && primitive && h_generic_asserted && (degree_positive || gcd_rd_one);
    let smooth = gcd_rds_one || (primitive && h_generic_asserted);
    let (conclusion, dim, deformation_type, summary) = if theorem {
        if dim < 0 {
            return Err(StabilityError::NegativeDimension(dim));
        }
        let label = format!("Hilb^{}(K3)", dim / 2);
        let summary = format!(
            "M = M^s; if non-empty, an irreducible symplectic manifold of dimension {dim} deformation equivalent to {label}"
        );
        (
            Conclusion::MequalsMsIrreducibleSymplectic(dim),
            Some(dim),
            Some(label),
            summary,
        )
    } else if smooth {
        let (dim, summary) = if dim >= 0 {
            (
                Some(dim),
                format!("M = M^s; if non-empty, a smooth projective scheme of dimension {dim}"),
            )
        } else {
            (
                None,
                "M = M^s; expected dimension is negative, so M is empty".to_string(),
            )
        };
        (Conclusion::MequalsMsOnly, dim, None, summary)
    } else {
        (
            Conclusion::ConditionsNotMet,
            None,
            None,
            "hypotheses not satisfied; no conclusion".to_string(),
        )
    };
    Ok(HypothesisReport {
        rank_positive,
        primitive,
        degree_positive,
        gcd_rd_one,
        gcd_rds_one,
        generic_asserted: h_generic_asserted,
        conclusion,
        dim,
        deformation_type,
        summary,
        nonemptiness: NonEmptiness::Unknown,
    })
}

/// Class of a skyscraper sheaf of length `k`.
pub fn skyscraper(x: &K3Surface, k: i64) -> MukaiVector {
    MukaiVector::new(0, LatticeVector::zero(x.picard_rank()), k)
}
