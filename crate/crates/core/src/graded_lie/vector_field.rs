//! Polynomial vector fields on `W[1]` for a space `W` concentrated in degree 0, so all
//! coordinates are odd of degree 1 and `∂_i` has degree -1.

use super::odd::{self, Mask};
use super::GradedLie;
use crate::error::{Error, Result};
use crate::graded_core::{q, Coeff, LinComb};

/// The field `x_S ∂_target`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VfKey {
    pub mono: Mask,
    pub target: u8,
}

impl VfKey {
    pub fn new(vars: &[usize], target: usize) -> Result<(i32, VfKey)> {
        let mut sign = 1;
        let mut m: Mask = 0;
        for &v in vars {
            match odd::mul(m, odd::bit(v)) {
                Some((s, m2)) => {
                    sign *= s;
                    m = m2;
                }
                None => return Ok((0, VfKey { mono: 0, target: target as u8 })),
            }
        }
        if target > 63 {
            return Err(Error::SizeMismatch("too many coordinates".into()));
        }
        Ok((sign, VfKey { mono: m, target: target as u8 }))
    }

    pub fn degree(&self) -> i32 {
        odd::count(self.mono) - 1
    }
}

pub type PolyVectorField<S = crate::graded_core::Rational> = LinComb<VfKey, S>;
/// Polynomials in the odd coordinates.
pub type OddPoly<S = crate::graded_core::Rational> = LinComb<Mask, S>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorFields {
    n: usize,
}

impl VectorFields {
    pub fn new(n: usize) -> Result<Self> {
        if n > 24 {
            return Err(Error::SizeMismatch("at most 24 odd coordinates are supported".into()));
        }
        Ok(VectorFields { n })
    }

    pub fn n_coords(&self) -> usize {
        self.n
    }

    /// `sign * x_vars ∂_target` as an element.
    pub fn field(&self, vars: &[usize], target: usize, c: crate::graded_core::Rational) -> PolyVectorField {
        let (s, k) = VfKey::new(vars, target).expect("coordinate index in range");
        if s == 0 {
            return PolyVectorField::zero();
        }
        PolyVectorField::term(k, c * q(s as i64))
    }

    /// Applies a field to a polynomial: `(g ∂_a)(h) = g · ∂_a h`.
    pub fn apply<S: Coeff>(&self, x: &PolyVectorField<S>, f: &OddPoly<S>) -> OddPoly<S> {
        let mut out = OddPoly::zero();
        for (k, c) in x.iter() {
            for (m, d) in f.iter() {
                if let Some((s1, m1)) = odd::left_deriv(k.target as usize, *m) {
                    if let Some((s2, m2)) = odd::mul(k.mono, m1) {
                        out.add_term(m2, c.mul(d).scale(&q((s1 * s2) as i64)));
                    }
                }
            }
        }
        out
    }
}

impl GradedLie for VectorFields {
    type Key = VfKey;

    fn degree(&self, key: &VfKey) -> i32 {
        key.degree()
    }

    fn bracket_keys(&self, x: &VfKey, y: &VfKey) -> Result<LinComb<VfKey>> {
        // [g∂_a, h∂_b] = (g ∂_a h) ∂_b - (-1)^{|X||Y|} (h ∂_b g) ∂_a
        let mut out = LinComb::zero();
        if let Some((s1, dh)) = odd::left_deriv(x.target as usize, y.mono) {
            if let Some((s2, m)) = odd::mul(x.mono, dh) {
                out.add_term(VfKey { mono: m, target: y.target }, q((s1 * s2) as i64));
            }
        }
        if let Some((s3, dg)) = odd::left_deriv(y.target as usize, x.mono) {
            if let Some((s4, m)) = odd::mul(y.mono, dg) {
                let k = if (x.degree() * y.degree()).rem_euclid(2) == 1 { -1 } else { 1 };
                out.add_term(VfKey { mono: m, target: x.target }, q((-k * s3 * s4) as i64));
            }
        }
        Ok(out)
    }

    fn basis(&self, degree: i32) -> Vec<VfKey> {
        if degree < -1 || degree + 1 > self.n as i32 {
            return vec![];
        }
        let mut out = Vec::new();
        for m in odd::masks_with(self.n, (degree + 1) as usize) {
            for t in 0..self.n {
                out.push(VfKey { mono: m, target: t as u8 });
            }
        }
        out
    }

    fn degree_range(&self) -> (i32, i32) {
        (-1, self.n as i32 - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded_lie::{bracket, check_lie_axioms, full_basis};

    #[test]
    fn bracket_of_d1_with_quadratic_field() {
        let vf = VectorFields::new(2).unwrap();
        let x = vf.field(&[], 0, q(1));
        let y = vf.field(&[0, 1], 1, q(1));
        assert_eq!(bracket(&vf, &x, &y).unwrap(), vf.field(&[1], 1, q(1)));
    }

    #[test]
    fn axioms_hold_on_three_coordinates() {
        let vf = VectorFields::new(3).unwrap();
        assert_eq!(check_lie_axioms(&vf, &full_basis(&vf)).unwrap(), None);
    }

    #[test]
    fn bracket_matches_commutator_of_actions() {
        let vf = VectorFields::new(3).unwrap();
        let keys = full_basis(&vf);
        let polys: Vec<Mask> = (0..8).collect();
        for a in &keys {
            for b in &keys {
                let x = LinComb::single(*a);
                let y = LinComb::single(*b);
                let xy = bracket(&vf, &x, &y).unwrap();
                let sign = if (a.degree() * b.degree()).rem_euclid(2) == 1 { -1 } else { 1 };
                for &m in &polys {
                    let f = OddPoly::single(m);
                    let lhs = vf.apply(&xy, &f);
                    let rhs = vf.apply(&x, &vf.apply(&y, &f)).sub(&vf.apply(&y, &vf.apply(&x, &f)).scale(&q(sign)));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}
