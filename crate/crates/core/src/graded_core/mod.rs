//! Graded linear algebra: exact scalars, graded spaces, Koszul signs, sparse linear
//! combinations and multilinear maps.

pub mod linalg;
pub mod lincomb;
pub mod multilinear;
pub mod perm;
pub mod poly;
pub mod scalar;
pub mod space;

pub use lincomb::LinComb;
pub use multilinear::{canonical_symmetric, MultilinearMap, Vector};
pub use perm::{block_to_front_sign, koszul_sign, subsets, unshuffles, Permutation};
pub use poly::Poly;
pub use scalar::{factorial, frac, q, Coeff, EpsScalar, Rational};
pub use space::GradedSpace;
