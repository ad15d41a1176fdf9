//! Integer lattices with a symmetric Gram matrix, modelling Pic(X) with its
//! intersection form, and the invariant sublattice of a group action.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{gcd_all, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("gram matrix must be square and symmetric")]
    NotSymmetric,
    #[error("invalid action: {0}")]
    InvalidAction(String),
}

/// Coordinates of a lattice vector in the chosen basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVector(pub Vec<i64>);

impl LatticeVector {
    pub fn zero(rank: usize) -> Self {
        Self(vec![0; rank])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn scaled(&self, k: i64) -> Self {
        Self(self.0.iter().map(|c| c * k).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn neg(&self) -> Self {
        self.scaled(-1)
    }

    pub fn to_scalars<T: Scalar>(&self) -> Vec<T> {
        self.0.iter().map(|&c| T::from_int(c)).collect()
    }
}

impl From<Vec<i64>> for LatticeVector {
    fn from(v: Vec<i64>) -> Self {
        Self(v)
    }
}

/// True iff the gcd of the coordinates is 1. The zero vector is not primitive.
pub fn is_primitive(v: &LatticeVector) -> bool {
    gcd_all(v.0.iter().copied()) == 1
}

/// Free lattice `Z^rho` with a symmetric integer Gram matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PicLattice {
    gram: Vec<Vec<i64>>,
}

impl PicLattice {
    pub fn new(gram: Vec<Vec<i64>>) -> Result<Self, LatticeError> {
        let n = gram.len();
        if gram.iter().any(|row| row.len() != n) {
            return Err(LatticeError::NotSymmetric);
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(LatticeError::NotSymmetric);
                }
            }
        }
        Ok(Self { gram })
    }

    /// Hyperbolic plane U with Gram `[[0, 1], [1, 0]]`.
    pub fn hyperbolic() -> Self {
        Self {
            gram: vec![vec![0, 1], vec![1, 0]],
        }
    }

    /// Rank-one lattice generated by a class of square `d`.
    pub fn rank_one(d: i64) -> Self {
        Self {
            gram: vec![vec![d]],
        }
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    /// All diagonal entries even, hence `v.v` even for every `v`.
    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram[i][i] % 2 == 0)
    }

    fn check_len(&self, len: usize) -> Result<(), LatticeError> {
        if len != self.rank() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.rank(),
                found: len,
            });
        }
        Ok(())
    }

    /// `u^T * gram * v`
    pub fn inner(&self, u: &LatticeVector, v: &LatticeVector) -> Result<i64, LatticeError> {
        self.check_len(u.len())?;
        self.check_len(v.len())?;
        let mut acc = 0i64;
        for (i, ui) in u.0.iter().enumerate() {
            if *ui == 0 {
                continue;
            }
            for (j, vj) in v.0.iter().enumerate() {
                acc += ui * self.gram[i][j] * vj;
            }
        }
        Ok(acc)
    }

    /// The same pairing on vectors with coefficients in any scalar type,
    /// e.g. rational classes in `Pic(X)_Q`.
    pub fn inner_with<T: Scalar>(&self, u: &[T], v: &[T]) -> Result<T, LatticeError> {
        self.check_len(u.len())?;
        self.check_len(v.len())?;
        let mut acc = T::zero();
        for (i, ui) in u.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (j, vj) in v.iter().enumerate() {
                if self.gram[i][j] != 0 {
                    acc = acc + ui.clone() * T::from_int(self.gram[i][j]) * vj.clone();
                }
            }
        }
        Ok(acc)
    }
}

type Matrix = Vec<Vec<i64>>;

/// A group acting on the lattice, given by generator matrices acting on
/// column vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupActionOnLattice {
    pub generators: Vec<Matrix>,
}

impl GroupActionOnLattice {
    pub fn new(generators: Vec<Matrix>) -> Self {
        Self { generators }
    }

    /// Checks every generator is a square integer isometry with determinant ±1.
    pub fn validate(&self, lattice: &PicLattice) -> Result<(), LatticeError> {
        let n = lattice.rank();
        for (idx, m) in self.generators.iter().enumerate() {
            if m.len() != n || m.iter().any(|row| row.len() != n) {
                return Err(LatticeError::InvalidAction(format!(
                    "generator {idx} is not {n}x{n}"
                )));
            }
            let mtgm = mat_mul(&transpose(m), &mat_mul(lattice.gram(), m));
            if mtgm != lattice.gram() {
                return Err(LatticeError::InvalidAction(format!(
                    "generator {idx} does not preserve the Gram form"
                )));
            }
            let det = determinant(m);
            if det != 1 && det != -1 {
                return Err(LatticeError::InvalidAction(format!(
                    "generator {idx} has determinant {det}"
                )));
            }
        }
        Ok(())
    }
}

pub fn apply(m: &[Vec<i64>], v: &LatticeVector) -> LatticeVector {
    LatticeVector(
        m.iter()
            .map(|row| row.iter().zip(&v.0).map(|(a, b)| a * b).sum())
            .collect(),
    )
}

fn transpose(m: &[Vec<i64>]) -> Matrix {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols)
        .map(|j| (0..rows).map(|i| m[i][j]).collect())
        .collect()
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Fraction-free (Bareiss) determinant.
pub fn determinant(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(p) => {
                    a.swap(k, p);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    (sign * a[n - 1][n - 1]) as i64
}

/// A Z-basis of the integer kernel of `a` (rows x cols), saturated and in
/// Hermite normal form.
///
/// Column operations reduce `a * u` to column echelon form with `u`
/// unimodular; the columns of `u` matching the zero columns span the kernel.
pub fn integer_kernel(a: &[Vec<i64>], cols: usize) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<i128>> = a
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut u: Vec<Vec<i128>> = (0..cols)
        .map(|i| (0..cols).map(|j| i128::from(i == j)).collect())
        .collect();
    let col_op =
        |m: &mut Vec<Vec<i128>>, u: &mut Vec<Vec<i128>>, dst: usize, src: usize, q: i128| {
            for row in m.iter_mut() {
                row[dst] -= q * row[src];
            }
            for row in u.iter_mut() {
                row[dst] -= q * row[src];
            }
        };
    let col_swap = |m: &mut Vec<Vec<i128>>, u: &mut Vec<Vec<i128>>, x: usize, y: usize| {
        for row in m.iter_mut() {
            row.swap(x, y);
        }
        for row in u.iter_mut() {
            row.swap(x, y);
        }
    };

    let mut pivot = 0;
    for r in 0..m.len() {
        if pivot == cols {
            break;
        }
        loop {
            let best = (pivot..cols)
                .filter(|&c| m[r][c] != 0)
                .min_by_key(|&c| m[r][c].abs());
            let Some(best) = best else { break };
            col_swap(&mut m, &mut u, pivot, best);
            let mut done = true;
            for c in pivot + 1..cols {
                if m[r][c] != 0 {
                    let q = m[r][c] / m[r][pivot];
                    col_op(&mut m, &mut u, c, pivot, q);
                    if m[r][c] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                pivot += 1;
                break;
            }
        }
    }

    let basis: Vec<Vec<i128>> = (pivot..cols)
        .map(|c| (0..cols).map(|i| u[i][c]).collect())
        .collect();
    hermite_rows(basis)
        .into_iter()
        .map(|r| r.into_iter().map(|x| x as i64).collect())
        .collect()
}

/// Row Hermite normal form; zero rows dropped.
fn hermite_rows(mut rows: Vec<Vec<i128>>) -> Vec<Vec<i128>> {
    let Some(width) = rows.first().map(|r| r.len()) else {
        return rows;
    };
    let mut r = 0;
    for c in 0..width {
        if r == rows.len() {
            break;
        }
        loop {
            let best = (r..rows.len())
                .filter(|&i| rows[i][c] != 0)
                .min_by_key(|&i| rows[i][c].abs());
            let Some(best) = best else { break };
            rows.swap(r, best);
            let mut done = true;
            for i in r + 1..rows.len() {
                if rows[i][c] != 0 {
                    let q = rows[i][c] / rows[r][c];
                    for j in 0..width {
                        rows[i][j] -= q * rows[r][j];
                    }
                    if rows[i][c] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if rows[r][c] == 0 {
            continue;
        }
        if rows[r][c] < 0 {
            for x in rows[r].iter_mut() {
                *x = -*x;
            }
        }
        for i in 0..r {
            let q = rows[i][c].div_euclid(rows[r][c]);
            if q != 0 {
                for j in 0..width {
                    rows[i][j] -= q * rows[r][j];
                }
            }
        }
        r += 1;
    }
    rows.truncate(r);
    rows
}

/// Z-basis of the sublattice fixed by every generator.
pub fn invariant_sublattice(
    action: &GroupActionOnLattice,
    lattice: &PicLattice,
) -> Result<Vec<LatticeVector>, LatticeError> {
    action.validate(lattice)?;
    let n = lattice.rank();
    let mut stacked: Matrix = Vec::new();
    for m in &action.generators {
        for (i, row) in m.iter().enumerate() {
            let mut r = row.clone();
            r[i] -= 1;
            stacked.push(r);
        }
    }
    Ok(integer_kernel(&stacked, n)
        .into_iter()
        .map(LatticeVector)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[i64]) -> LatticeVector {
        LatticeVector(c.to_vec())
    }

    #[test]
    fn inner_examples() {
        let quartic = PicLattice::rank_one(4);
        assert_eq!(quartic.inner(&v(&[1]), &v(&[1])).unwrap(), 4);
        let u = PicLattice::hyperbolic();
        assert_eq!(u.inner(&v(&[1, 0]), &v(&[0, 1])).unwrap(), 1);
        // (e + f)^2 = e^2 + 2 e.f + f^2 = 0 + 2 + 0
        assert_eq!(u.inner(&v(&[1, 1]), &v(&[1, 1])).unwrap(), 2);
        assert_eq!(
            u.inner(&v(&[1]), &v(&[1, 1])),
            Err(LatticeError::DimensionMismatch {
                expected: 2,
                found: 1
            })
        );
    }

    #[test]
    fn primitivity() {
        assert!(is_primitive(&v(&[1, 0, 3])));
        assert!(!is_primitive(&v(&[2, 4])));
        assert!(!is_primitive(&v(&[0])));
        assert!(is_primitive(&v(&[-3, 5])));
    }

    #[test]
    fn asymmetric_gram_rejected() {
        assert_eq!(
            PicLattice::new(vec![vec![2, 1], vec![0, 2]]),
            Err(LatticeError::NotSymmetric)
        );
        assert_eq!(
            PicLattice::new(vec![vec![2, 1]]),
            Err(LatticeError::NotSymmetric)
        );
    }

    #[test]
    fn invariant_identity_action() {
        let l = PicLattice::hyperbolic();
        let act = GroupActionOnLattice::new(vec![vec![vec![1, 0], vec![0, 1]]]);
        assert_eq!(
            invariant_sublattice(&act, &l).unwrap(),
            vec![v(&[1, 0]), v(&[0, 1])]
        );
    }

    #[test]
    fn invariant_swap_action() {
        let l = PicLattice::hyperbolic();
        let act = GroupActionOnLattice::new(vec![vec![vec![0, 1], vec![1, 0]]]);
        assert_eq!(invariant_sublattice(&act, &l).unwrap(), vec![v(&[1, 1])]);
    }

    #[test]
    fn invariant_negation_action() {
        let l = PicLattice::rank_one(2);
        let act = GroupActionOnLattice::new(vec![vec![vec![-1]]]);
        assert!(invariant_sublattice(&act, &l).unwrap().is_empty());
    }

    #[test]
    fn non_isometry_rejected() {
        let l = PicLattice::rank_one(2);
        let act = GroupActionOnLattice::new(vec![vec![vec![2]]]);
        assert!(matches!(
            invariant_sublattice(&act, &l),
            Err(LatticeError::InvalidAction(_))
        ));
        let l2 = PicLattice::new(vec![vec![0, 0], vec![0, 0]]).unwrap();
        let singular = GroupActionOnLattice::new(vec![vec![vec![1, 1], vec![1, 1]]]);
        assert!(matches!(
            invariant_sublattice(&singular, &l2),
            Err(LatticeError::InvalidAction(_))
        ));
    }

    #[test]
    fn kernel_is_saturated() {
        // kernel of [2, -2, 0] is spanned by (1,1,0), (0,0,1); a naive
        // rational basis could pick (2,2,0)
        let k = integer_kernel(&[vec![2, -2, 0]], 3);
        assert_eq!(k, vec![vec![1, 1, 0], vec![0, 0, 1]]);
        // row with a gcd: x + 2y + 4z = 0
        let k = integer_kernel(&[vec![1, 2, 4]], 3);
        assert_eq!(k.len(), 2);
        for row in &k {
            assert_eq!(row[0] + 2 * row[1] + 4 * row[2], 0);
        }
        assert_eq!(determinant(&[vec![2, 0], vec![0, 3]]), 6);
        assert_eq!(determinant(&[vec![0, 1], vec![1, 0]]), -1);
    }
}
