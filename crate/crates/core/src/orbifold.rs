//! Orbifold Mukai calculus on `[X/G]` for a finite symplectic group `G`
//! acting on a K3 surface `X`.
//!
//! The twisted sectors of the inertia stack are indexed by a nontrivial
//! conjugacy class `g_i` together with a centralizer orbit of fixed points of
//! `g_i`. Each sector only enters the orbifold Mukai pairing through the order
//! of its stabilizer `G_ij` and the real part of the eigenvalue `lambda_ij` of
//! `g_i` on the tangent plane, so that is all [`GroupFixedData`] records:
//!
//! ```text
//! <(v, v_ij), (w, w_ij)> = <v, w>_X / |G|
//!                        + 1/2 sum_ij conj(v_ij) w_ij / (|G_ij| (1 - Re lambda_ij))
//! ```

use std::collections::{BTreeMap, HashMap};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mukai::{K3Surface, MukaiError, MukaiVector};
use crate::scalar::{int, ratio, render_rational, to_i64};
use crate::wire::render_cyc;
use crate::{CycNum, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbifoldError {
    #[error(transparent)]
    Mukai(#[from] MukaiError),
    #[error("expected a rational value, got {0}")]
    NotRational(String),
    #[error("expected an integer, got {0}")]
    NotIntegral(String),
    #[error("twisted tuple has length {found}, data has {expected} sectors")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("moduli dimension {0} is odd")]
    OddDimension(i64),
    #[error("invalid fixed-point counts: {0}")]
    InvalidCounts(String),
    #[error("cannot solve for the fixed-point count of order {0}")]
    UnsolvableOrder(u64),
    #[error("invalid group data: {0}")]
    InvalidData(String),
}

/// A run of `count` identical centralizer orbits of fixed points.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwistedOrbit {
    /// `|G_ij|`
    #[serde(rename = "stab")]
    pub stab_order: u64,
    /// `lambda_ij = zeta_{n_i}^eig_exp`
    pub eig_exp: i64,
    pub count: u64,
}

/// A nontrivial conjugacy class of order `n_i` and its fixed-point orbits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistedClass {
    pub order: u64,
    pub orbits: Vec<TwistedOrbit>,
}

/// The fixed-point skeleton of a finite symplectic action.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupFixedData {
    pub group_order: u64,
    #[serde(default)]
    pub classes: Vec<TwistedClass>,
}

impl GroupFixedData {
    pub fn trivial() -> Self {
        Self {
            group_order: 1,
            classes: Vec::new(),
        }
    }

    /// A Nikulin involution: eight isolated fixed points with stabilizer Z/2.
    pub fn nikulin() -> Self {
        Self {
            group_order: 2,
            classes: vec![TwistedClass {
                order: 2,
                orbits: vec![TwistedOrbit {
                    stab_order: 2,
                    eig_exp: 1,
                    count: 8,
                }],
            }],
        }
    }

    /// Total number `m` of twisted sectors.
    pub fn twisted_count(&self) -> usize {
        self.classes
            .iter()
            .flat_map(|c| &c.orbits)
            .map(|o| o.count as usize)
            .sum()
    }

    /// Number of sectors belonging to each class, in order.
    pub fn sectors_per_class(&self) -> Vec<usize> {
        self.classes
            .iter()
            .map(|c| c.orbits.iter().map(|o| o.count as usize).sum())
            .collect()
    }

    /// Checks divisibility and primitivity constraints on the raw data.
    pub fn validate_structure(&self) -> Result<(), OrbifoldError> {
        let bad = |msg: String| Err(OrbifoldError::InvalidData(msg));
        if self.group_order == 0 {
            return bad("group order must be positive".into());
        }
        for (i, class) in self.classes.iter().enumerate() {
            if class.order < 2 {
                return bad(format!("class {i}: nontrivial classes have order >= 2"));
            }
            if !self.group_order.is_multiple_of(class.order) {
                return bad(format!(
                    "class {i}: order {} does not divide |G| = {}",
                    class.order, self.group_order
                ));
            }
            if class.orbits.is_empty() {
                return bad(format!("class {i}: fixed locus must be nonempty"));
            }
            for (j, orbit) in class.orbits.iter().enumerate() {
                if orbit.count == 0 {
                    return bad(format!("class {i} orbit {j}: count must be positive"));
                }
                if orbit.stab_order == 0 || !self.group_order.is_multiple_of(orbit.stab_order) {
                    return bad(format!(
                        "class {i} orbit {j}: stabilizer order {} does not divide |G|",
                        orbit.stab_order
                    ));
                }
                if orbit.stab_order % class.order != 0 {
                    return bad(format!(
                        "class {i} orbit {j}: class order {} does not divide stabilizer order {}",
                        class.order, orbit.stab_order
                    ));
                }
                if orbit.eig_exp.gcd(&(class.order as i64)) != 1 {
                    return bad(format!(
                        "class {i} orbit {j}: eigenvalue exponent {} is not coprime to {}",
                        orbit.eig_exp, class.order
                    ));
                }
            }
        }
        Ok(())
    }

    /// `1 / (|G_ij| (1 - Re lambda_ij))` for every sector, flattened in order.
    pub fn sector_weights(&self) -> Vec<CycNum> {
        let mut cache = WeightCache::default();
        let mut out = Vec::with_capacity(self.twisted_count());
        for class in &self.classes {
            for orbit in &class.orbits {
                let w = cache
                    .inverse_gap(class.order, orbit.eig_exp)
                    .scale(&ratio(1, orbit.stab_order as i64));
                out.extend(std::iter::repeat_n(w, orbit.count as usize));
            }
        }
        out
    }
}

/// Memoizes `1 / (1 - Re zeta_n^e)`.
#[derive(Default)]
struct WeightCache {
    values: HashMap<(u64, i64), CycNum>,
}

impl WeightCache {
    fn inverse_gap(&mut self, n: u64, e: i64) -> CycNum {
        let key = (n, e.rem_euclid(n as i64));
        self.values
            .entry(key)
            .or_insert_with(|| {
                let gap = CycNum::one() - CycNum::root_of_unity(n, e).real_part();
                gap.inv()
                    .expect("eigenvalue of a nontrivial class is not 1")
            })
            .clone()
    }
}

/// Left-hand side of `1/|G| + 1/4 sum_ij 1/(|G_ij|(1 - Re lambda_ij)) = 1`.
///
/// Geometric data always gives exactly 1; the value is returned so callers
/// can inspect hypothetical data.
pub fn validate_identity(data: &GroupFixedData) -> Result<Rational, OrbifoldError> {
    data.validate_structure()?;
    let sum: CycNum = data.sector_weights().into_iter().sum();
    let lhs = CycNum::from_scalar(ratio(1, data.group_order as i64)) + sum.scale(&ratio(1, 4));
    lhs.to_scalar()
        .map_err(|_| OrbifoldError::NotRational(render_cyc(&lhs)))
}

/// Orbifold Mukai vector `(v, (v_ij))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbMukaiVector {
    #[serde(flatten)]
    pub v: MukaiVector,
    #[serde(default)]
    pub twisted: Vec<CycNum>,
}

impl OrbMukaiVector {
    pub fn new(v: MukaiVector, twisted: Vec<CycNum>) -> Self {
        Self { v, twisted }
    }
}

/// `v~(O_X) = ((1, 0, 1), (1, ..., 1))`
pub fn orb_mukai_structure_sheaf(data: &GroupFixedData, picard_rank: usize) -> OrbMukaiVector {
    OrbMukaiVector::new(
        MukaiVector::structure_sheaf(picard_rank),
        vec![CycNum::one(); data.twisted_count()],
    )
}

/// `v~(O_p) = ((0, 0, |G|), (0, ..., 0))` for a point on a free orbit.
pub fn orb_mukai_free_point(data: &GroupFixedData, picard_rank: usize) -> OrbMukaiVector {
    OrbMukaiVector::new(
        MukaiVector::new(
            0,
            crate::lattice::LatticeVector::zero(picard_rank),
            data.group_order as i64,
        ),
        vec![CycNum::zero(); data.twisted_count()],
    )
}

/// Orbifold vector of a class whose twisted components take the value
/// `class_values[i]` on every sector of class `i` (e.g. a character value).
pub fn orb_mukai_with_class_values(
    v: MukaiVector,
    data: &GroupFixedData,
    class_values: &[CycNum],
) -> Result<OrbMukaiVector, OrbifoldError> {
    if class_values.len() != data.classes.len() {
        return Err(OrbifoldError::InvalidData(format!(
            "{} class values for {} classes",
            class_values.len(),
            data.classes.len()
        )));
    }
    let twisted = data
        .sectors_per_class()
        .into_iter()
        .zip(class_values)
        .flat_map(|(n, x)| std::iter::repeat_n(x.clone(), n))
        .collect();
    Ok(OrbMukaiVector::new(v, twisted))
}

/// Values `chi_j(g^k) = zeta_n^(jk)`, `k = 1..n-1`, of the j-th character of
/// `Z/n`, in the class order used by [`cyclic_fixed_data`].
pub fn cyclic_character_values(n: u64, j: i64) -> Vec<CycNum> {
    (1..n as i64)
        .map(|k| CycNum::root_of_unity(n, j * k))
        .collect()
}

/// `v~(O_X (x) rho_j)` for the cyclic group `Z/n`.
pub fn orb_mukai_cyclic_character(
    data: &GroupFixedData,
    picard_rank: usize,
    n: u64,
    j: i64,
) -> Result<OrbMukaiVector, OrbifoldError> {
    orb_mukai_with_class_values(
        MukaiVector::structure_sheaf(picard_rank),
        data,
        &cyclic_character_values(n, j),
    )
}

/// The untwisted component `v`.
pub fn numerical_pullback(a: &OrbMukaiVector) -> MukaiVector {
    a.v.clone()
}

/// Orbifold Mukai pairing; conjugate-linear in the first argument.
pub fn orb_pairing(
    a: &OrbMukaiVector,
    b: &OrbMukaiVector,
    data: &GroupFixedData,
    x: &K3Surface,
) -> Result<CycNum, OrbifoldError> {
    let m = data.twisted_count();
    for t in [&a.twisted, &b.twisted] {
        if t.len() != m {
            return Err(OrbifoldError::DimensionMismatch {
                expected: m,
                found: t.len(),
            });
        }
    }
    let untwisted = ratio(x.mukai_pairing(&a.v, &b.v)?, data.group_order as i64);
    let twisted: CycNum = a
        .twisted
        .iter()
        .zip(&b.twisted)
        .zip(data.sector_weights())
        .filter(|((u, v), _)| !u.is_zero() && !v.is_zero())
        .map(|((u, v), w)| u.conj() * v.clone() * w)
        .sum();
    Ok(CycNum::from_scalar(untwisted) + twisted.scale(&ratio(1, 2)))
}

/// Orbifold Euler pairing `chi(a, b)`, which must be an integer.
pub fn orb_euler(
    a: &OrbMukaiVector,
    b: &OrbMukaiVector,
    data: &GroupFixedData,
    x: &K3Surface,
) -> Result<i64, OrbifoldError> {
    let p = orb_pairing(a, b, data, x)?;
    let not_integral = || OrbifoldError::NotIntegral(render_cyc(&p));
    let q = p.to_scalar().map_err(|_| not_integral())?;
    to_i64(&q).ok_or_else(not_integral)
}

/// `2 - <v~^2>`, required to be even.
pub fn moduli_dimension(
    a: &OrbMukaiVector,
    data: &GroupFixedData,
    x: &K3Surface,
) -> Result<i64, OrbifoldError> {
    let dim = 2 - orb_euler(a, a, data, x)?;
    if dim % 2 != 0 {
        return Err(OrbifoldError::OddDimension(dim));
    }
    Ok(dim)
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// Order of `g^k` in `Z/n`.
fn power_order(n: u64, k: u64) -> u64 {
    n / n.gcd(&k)
}

/// Fixed-point counts keyed by element order (`f_d` for `d | n`, `d > 1`),
/// checked for consistency across powers of equal order.
fn counts_by_order(
    n: u64,
    counts: &BTreeMap<u64, u64>,
) -> Result<BTreeMap<u64, u64>, OrbifoldError> {
    if n < 2 {
        return Err(OrbifoldError::InvalidCounts(format!("order {n} < 2")));
    }
    let mut by_order = BTreeMap::new();
    for k in 1..n {
        let s = *counts
            .get(&k)
            .ok_or_else(|| OrbifoldError::InvalidCounts(format!("missing count for g^{k}")))?;
        if s == 0 {
            return Err(OrbifoldError::InvalidCounts(format!(
                "g^{k} must have a nonempty fixed locus"
            )));
        }
        let d = power_order(n, k);
        match by_order.insert(d, s) {
            Some(prev) if prev != s => {
                return Err(OrbifoldError::InvalidCounts(format!(
                    "powers of order {d} have fixed-point counts {prev} and {s}"
                )))
            }
            _ => {}
        }
    }
    if let Some(k) = counts.keys().find(|&&k| k == 0 || k >= n) {
        return Err(OrbifoldError::InvalidCounts(format!(
            "power {k} out of range 1..{n}"
        )));
    }
    Ok(by_order)
}

/// Number of orbits (of size `n/m`) of points whose stabilizer has order
/// exactly `m`, for each divisor `m > 1` of `n`.
fn exact_stabilizer_orbits(
    n: u64,
    by_order: &BTreeMap<u64, u64>,
) -> Result<BTreeMap<u64, u64>, OrbifoldError> {
    let mut exact: BTreeMap<u64, i64> = BTreeMap::new();
    for m in divisors(n).into_iter().rev().filter(|&m| m > 1) {
        let larger: i64 = exact
            .iter()
            .filter(|(&m2, _)| m2 % m == 0)
            .map(|(_, &e)| e)
            .sum();
        let e = by_order[&m] as i64 - larger;
        if e < 0 {
            return Err(OrbifoldError::InvalidCounts(format!(
                "f_{m} = {} is smaller than the number of points with larger stabilizer ({larger})",
                by_order[&m]
            )));
        }
        exact.insert(m, e);
    }
    let mut orbits = BTreeMap::new();
    for (m, e) in exact {
        let points = e as u64 * m;
        if !points.is_multiple_of(n) {
            return Err(OrbifoldError::InvalidCounts(format!(
                "{e} points with stabilizer of order {m} do not split into orbits of size {}",
                n / m
            )));
        }
        orbits.insert(m, points / n);
    }
    Ok(orbits)
}

/// Local eigenvalue type of a run of orbits: the generator `g^(n/m)` of the
/// stabilizer acts with eigenvalue `zeta_m^t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct OrbitType {
    stab: u64,
    t: u64,
    count: u64,
}

fn build_cyclic_classes(n: u64, types: &[OrbitType]) -> GroupFixedData {
    let classes = (1..n)
        .map(|k| {
            let order = power_order(n, k);
            let step = k / n.gcd(&k);
            let mut orbits: Vec<TwistedOrbit> = Vec::new();
            for ty in types
                .iter()
                .filter(|ty| ty.stab % order == 0 && ty.count > 0)
            {
                let eig_exp = ((ty.t * step) % order) as i64;
                match orbits
                    .iter_mut()
                    .find(|o| o.stab_order == ty.stab && o.eig_exp == eig_exp)
                {
                    Some(o) => o.count += ty.count,
                    None => orbits.push(TwistedOrbit {
                        stab_order: ty.stab,
                        eig_exp,
                        count: ty.count,
                    }),
                }
            }
            TwistedClass { order, orbits }
        })
        .collect();
    GroupFixedData {
        group_order: n,
        classes,
    }
}

/// Fixed-point data of `Z/n = <g>` from the counts `s_k = |X^{g^k}|`.
///
/// Class `k` is `g^k`, every eigenvalue is `lambda_k = zeta_n^k`, and the
/// orbits are arranged so that `sum_j 1/|G_kj| = s_k / n`.
pub fn cyclic_fixed_data(
    n: u64,
    counts: &BTreeMap<u64, u64>,
) -> Result<GroupFixedData, OrbifoldError> {
    let by_order = counts_by_order(n, counts)?;
    let orbits = exact_stabilizer_orbits(n, &by_order)?;
    let types: Vec<OrbitType> = orbits
        .into_iter()
        .map(|(stab, count)| OrbitType { stab, t: 1, count })
        .collect();
    Ok(build_cyclic_classes(n, &types))
}

/// Like [`cyclic_fixed_data`], but the fixed points are spread over local
/// eigenvalue types `zeta_m^t` so that every class satisfies
/// `sum_j 1/(|G_kj| (1 - Re lambda_kj)) = 4/n`, the balance obeyed by each
/// individual symplectic automorphism. With this data the Euler pairings of
/// the classes `O (x) rho_j` are integers.
///
/// The first balanced assignment in lexicographic order is returned.
pub fn cyclic_fixed_data_balanced(
    n: u64,
    counts: &BTreeMap<u64, u64>,
) -> Result<GroupFixedData, OrbifoldError> {
    const SEARCH_LIMIT: usize = 1_000_000;

    let by_order = counts_by_order(n, counts)?;
    let orbits = exact_stabilizer_orbits(n, &by_order)?;
    let groups: Vec<(u64, u64, Vec<u64>)> = orbits
        .into_iter()
        .filter(|&(_, c)| c > 0)
        .map(|(m, c)| {
            let reps = (1..=m / 2).filter(|t| t.gcd(&m) == 1).collect::<Vec<_>>();
            (m, c, if reps.is_empty() { vec![1] } else { reps })
        })
        .collect();

    let mut cache = WeightCache::default();
    let target = ratio(4, n as i64);
    let mut tried = 0usize;
    let mut choice: Vec<Vec<u64>> = Vec::new();
    let found = search_types(&groups, 0, &mut choice, &mut |choice| {
        tried += 1;
        if tried > SEARCH_LIMIT {
            return Some(false);
        }
        let types = flatten_choice(&groups, choice);
        let balanced = (1..n).all(|k| {
            let order = power_order(n, k);
            let step = k / n.gcd(&k);
            let sum: CycNum = types
                .iter()
                .filter(|ty| ty.stab % order == 0 && ty.count > 0)
                .map(|ty| {
                    cache
                        .inverse_gap(order, (ty.t * step) as i64)
                        .scale(&ratio(ty.count as i64, ty.stab as i64))
                })
                .sum();
            sum.to_scalar().is_ok_and(|q| q == target)
        });
        balanced.then_some(true)
    });
    match found {
        Some(true) => Ok(build_cyclic_classes(n, &flatten_choice(&groups, &choice))),
        Some(false) => Err(OrbifoldError::InvalidCounts(format!(
            "eigenvalue type search exceeded {SEARCH_LIMIT} candidates"
        ))),
        None => Err(OrbifoldError::InvalidCounts(
            "no assignment of local eigenvalue types balances every class".into(),
        )),
    }
}

fn flatten_choice(groups: &[(u64, u64, Vec<u64>)], choice: &[Vec<u64>]) -> Vec<OrbitType> {
    groups
        .iter()
        .zip(choice)
        .flat_map(|((m, _, reps), split)| {
            reps.iter()
                .zip(split)
                .map(|(&t, &count)| OrbitType { stab: *m, t, count })
        })
        .collect()
}

/// Depth-first enumeration of ways to split each group's orbit count over its
/// type representatives. The visitor returns `Some(_)` to stop.
fn search_types(
    groups: &[(u64, u64, Vec<u64>)],
    depth: usize,
    choice: &mut Vec<Vec<u64>>,
    visit: &mut impl FnMut(&[Vec<u64>]) -> Option<bool>,
) -> Option<bool> {
    if depth == groups.len() {
        return visit(choice);
    }
    let (_, total, reps) = &groups[depth];
    let mut split = vec![0u64; reps.len()];
    compositions(*total, 0, &mut split, &mut |split| {
        choice.push(split.to_vec());
        let r = search_types(groups, depth + 1, choice, visit);
        if r.is_none() {
            choice.pop();
        }
        r
    })
}

fn compositions(
    remaining: u64,
    idx: usize,
    split: &mut Vec<u64>,
    f: &mut impl FnMut(&[u64]) -> Option<bool>,
) -> Option<bool> {
    if idx + 1 == split.len() {
        split[idx] = remaining;
        return f(split);
    }
    for c in (0..=remaining).rev() {
        split[idx] = c;
        if let Some(r) = compositions(remaining - c, idx + 1, split, f) {
            return Some(r);
        }
    }
    None
}

/// Counts `s_k = f_{ord(g^k)}` for `Z/n` from fixed-point numbers by order.
pub fn cyclic_counts(n: u64, f_by_order: impl Fn(u64) -> u64) -> BTreeMap<u64, u64> {
    (1..n).map(|k| (k, f_by_order(power_order(n, k)))).collect()
}

/// Solution of the fixed-point equation for one order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixedPointSolution {
    pub order: u64,
    #[serde(with = "crate::wire::rational")]
    pub value: Rational,
    pub integral: bool,
}

/// Solves `1/n + 1/(4n) sum_k s_k / (1 - Re zeta_n^k) = 1` for `f_n`, where
/// `s_k = f_n` when `g^k` generates and `s_k = f_{ord(g^k)}` (solved
/// recursively) otherwise.
pub fn solve_fixed_points(n: u64) -> Result<FixedPointSolution, OrbifoldError> {
    let mut memo = HashMap::new();
    let value = solve_rec(n, &mut memo)?;
    Ok(FixedPointSolution {
        order: n,
        integral: value.is_integer(),
        value,
    })
}

fn solve_rec(n: u64, memo: &mut HashMap<u64, Rational>) -> Result<Rational, OrbifoldError> {
    if n < 2 {
        return Err(OrbifoldError::UnsolvableOrder(n));
    }
    if let Some(v) = memo.get(&n) {
        return Ok(v.clone());
    }
    let mut cache = WeightCache::default();
    let mut unknown = CycNum::zero();
    let mut known = CycNum::zero();
    for k in 1..n {
        let w = cache.inverse_gap(n, k as i64);
        let order = power_order(n, k);
        if order == n {
            unknown = unknown + w;
        } else {
            let f = solve_rec(order, memo).map_err(|_| OrbifoldError::UnsolvableOrder(n))?;
            known = known + w.scale(&f);
        }
    }
    let unsolvable = || OrbifoldError::UnsolvableOrder(n);
    let a = unknown.to_scalar().map_err(|_| unsolvable())?;
    let b = known.to_scalar().map_err(|_| unsolvable())?;
    if a.is_zero() {
        return Err(unsolvable());
    }
    // f * a + b = 4n (1 - 1/n) = 4 (n - 1)
    let f = (int(4 * (n as i64 - 1)) - b) / a;
    if !f.is_positive() {
        return Err(unsolvable());
    }
    memo.insert(n, f.clone());
    Ok(f)
}

/// Fixed-point counts of symplectic automorphisms of order 2..=8.
pub fn fixed_point_table() -> Result<Vec<FixedPointSolution>, OrbifoldError> {
    (2..=8).map(solve_fixed_points).collect()
}

/// Cyclic data for `Z/n` with counts taken from [`solve_fixed_points`].
pub fn solved_cyclic_counts(n: u64) -> Result<BTreeMap<u64, u64>, OrbifoldError> {
    let mut by_order = BTreeMap::new();
    for d in divisors(n).into_iter().filter(|&d| d > 1) {
        let sol = solve_fixed_points(d)?;
        let v = to_i64(&sol.value)
            .filter(|v| *v > 0)
            .ok_or_else(|| OrbifoldError::NotIntegral(render_rational(&sol.value)))?;
        by_order.insert(d, v as u64);
    }
    Ok(cyclic_counts(n, |d| by_order[&d]))
}

impl GroupFixedData {
    /// `1` in the rational sense; convenience for validity checks.
    pub fn satisfies_identity(&self) -> bool {
        validate_identity(self).is_ok_and(|q| q.is_one())
    }
}
