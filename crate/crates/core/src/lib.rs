//! Exact Mukai-lattice, orbifold Riemann-Roch and central-charge computations
//! for K3 surfaces and their symplectic quotient stacks `[X/G]`.
//!
//! All arithmetic is exact. The generic layers ([`poly`], [`cyclotomic`],
//! [`gaussian`]) are written against [`Scalar`]; the geometric layers use the
//! concrete aliases defined here.

#![allow(clippy::needless_range_loop)]

pub mod cyclotomic;
pub mod gaussian;
pub mod lattice;
pub mod mukai;
pub mod orbifold;
pub mod poly;
pub mod scalar;
pub mod stability;
pub mod wire;

pub use cyclotomic::{Cyclotomic, CyclotomicError};
pub use gaussian::Gaussian;
pub use scalar::Scalar;

/// Arbitrary-precision rational number.
pub type Rational = num_rational::BigRational;
/// Element of a cyclotomic field over Q.
pub type CycNum = Cyclotomic<Rational>;
/// Gaussian rational `a + bi`.
pub type GaussianRational = Gaussian<Rational>;
