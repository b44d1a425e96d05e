//! Concrete graded Lie algebras: polynomial vector fields on odd coordinates, functions
//! with the big bracket, and coderivations of truncated tensor and symmetric coalgebras.

pub mod big_bracket;
pub mod coder;
pub mod odd;
pub mod vector_field;

use crate::error::Result;
use crate::graded_core::{q, Coeff, LinComb};
use std::collections::BTreeMap;
use std::fmt::Debug;
use std::hash::Hash;

pub use big_bracket::{BbKey, BigBracket};
pub use coder::{CoderAlgebra, CoderKey, Coderivation, Flavor, Overflow};
pub use vector_field::{VectorFields, VfKey};

/// A graded Lie algebra with a distinguished basis of keys.
pub trait GradedLie: Send + Sync {
    type Key: Clone + Ord + Hash + Debug + Send + Sync;

    fn degree(&self, key: &Self::Key) -> i32;

    fn bracket_keys(&self, a: &Self::Key, b: &Self::Key) -> Result<LinComb<Self::Key>>;

    /// Basis keys of one degree inside the computational window.
    fn basis(&self, degree: i32) -> Vec<Self::Key>;

    /// Inclusive range of degrees in which `basis` can be non-empty.
    fn degree_range(&self) -> (i32, i32);
}

pub fn bracket<G: GradedLie, S: Coeff>(
    lie: &G,
    x: &LinComb<G::Key, S>,
    y: &LinComb<G::Key, S>,
) -> Result<LinComb<G::Key, S>> {
    let mut out = LinComb::zero();
    for (a, ca) in x.iter() {
        for (b, cb) in y.iter() {
            let kb = lie.bracket_keys(a, b)?;
            if kb.is_zero() {
                continue;
            }
            out.add_scaled_q(&kb, &ca.mul(cb));
        }
    }
    Ok(out)
}

/// Left-nested bracket `[...[[x, y_1], y_2], ..., y_n]`.
pub fn nested_bracket<G: GradedLie, S: Coeff>(
    lie: &G,
    x: &LinComb<G::Key, S>,
    ys: &[LinComb<G::Key, S>],
) -> Result<LinComb<G::Key, S>> {
    let mut acc = x.clone();
    for y in ys {
        if acc.is_zero() {
            break;
        }
        acc = bracket(lie, &acc, y)?;
    }
    Ok(acc)
}

pub fn split_by_degree<G: GradedLie, S: Coeff>(lie: &G, x: &LinComb<G::Key, S>) -> BTreeMap<i32, LinComb<G::Key, S>> {
    let mut out: BTreeMap<i32, LinComb<G::Key, S>> = BTreeMap::new();
    for (k, c) in x.iter() {
        out.entry(lie.degree(k)).or_default().add_term(k.clone(), c.clone());
    }
    out
}

/// The degree of a non-zero homogeneous element.
pub fn homogeneous_degree<G: GradedLie, S: Coeff>(lie: &G, x: &LinComb<G::Key, S>) -> Option<i32> {
    let mut d = None;
    for k in x.keys() {
        let e = lie.degree(k);
        match d {
            None => d = Some(e),
            Some(d0) if d0 != e => return None,
            _ => {}
        }
    }
    d
}

pub fn full_basis<G: GradedLie>(lie: &G) -> Vec<G::Key> {
    let (lo, hi) = lie.degree_range();
    (lo..=hi).flat_map(|d| lie.basis(d)).collect()
}

fn koszul(a: i32, b: i32) -> i32 {
    if (a * b).rem_euclid(2) == 1 {
        -1
    } else {
        1
    }
}

/// Checks graded antisymmetry and the graded Jacobi identity on the given keys,
/// returning the first failing triple.
pub fn check_lie_axioms<G: GradedLie>(lie: &G, keys: &[G::Key]) -> Result<Option<Vec<G::Key>>> {
    for a in keys {
        for b in keys {
            let ab = lie.bracket_keys(a, b)?;
            let ba = lie.bracket_keys(b, a)?;
            let s = -koszul(lie.degree(a), lie.degree(b));
            if ab != ba.scale(&q(s as i64)) {
                return Ok(Some(vec![a.clone(), b.clone()]));
            }
        }
    }
    for a in keys {
        for b in keys {
            for c in keys {
                let (da, db) = (lie.degree(a), lie.degree(b));
                let x = LinComb::<G::Key>::single(a.clone());
                let y = LinComb::single(b.clone());
                let z = LinComb::single(c.clone());
                // [x,[y,z]] = [[x,y],z] + (-1)^{|x||y|} [y,[x,z]]
                let lhs = bracket(lie, &x, &bracket(lie, &y, &z)?)?;
                let r1 = bracket(lie, &bracket(lie, &x, &y)?, &z)?;
                let r2 = bracket(lie, &y, &bracket(lie, &x, &z)?)?.scale(&q(koszul(da, db) as i64));
                if lhs != r1.add(&r2) {
                    return Ok(Some(vec![a.clone(), b.clone(), c.clone()]));
                }
            }
        }
    }
    Ok(None)
}
