//! Derived brackets `{a_1, ..., a_n} = P[...[[Δ, a_1], a_2], ..., a_n]` on `a`, with `{∅} = PΔ`.

use super::linf::LInfinity;
use super::VData;
use crate::error::{Error, Result};
use crate::graded_core::{Coeff, LinComb};
use crate::graded_lie::{bracket, full_basis, nested_bracket, split_by_degree, GradedLie};

pub struct DerivedAlgebra<'a, G: GradedLie> {
    vd: &'a VData<G>,
}

impl<'a, G: GradedLie> DerivedAlgebra<'a, G> {
    pub fn new(vd: &'a VData<G>) -> Self {
        DerivedAlgebra { vd }
    }

    pub fn vdata(&self) -> &VData<G> {
        self.vd
    }

    /// Certified number of non-vanishing steps of `t_{k+1} = [t_k, φ]` starting from `t_0`.
    pub(crate) fn chain_length<S: Coeff>(&self, t0: &LinComb<G::Key, S>, phi: &LinComb<G::Key, S>) -> Result<usize> {
        let lie = self.vd.lie();
        let cap = match self.vd.weight() {
            Some(w) if w.min_of(phi).unwrap_or(1) >= 1 => match w.min_of(t0) {
                Some(m) => (w.max - m + 1).max(0) as usize,
                None => 0,
            },
            _ if phi.keys().all(|k| lie.degree(k) == 0) => {
                split_by_degree(lie, t0).keys().map(|d| lie.basis(*d).len()).max().unwrap_or(0)
            }
            _ => full_basis(lie).len(),
        };
        let mut t = t0.clone();
        let mut k = 0;
        while !t.is_zero() {
            if k >= cap {
                return Err(Error::UnverifiableTruncation(format!(
                    "bracket chain still non-zero after {cap} steps; the element is neither filtered nor nilpotent"
                )));
            }
            t = bracket(lie, &t, phi)?;
            k += 1;
        }
        Ok(k)
    }
}

impl<'a, G: GradedLie, S: Coeff> LInfinity<S> for DerivedAlgebra<'a, G> {
    type Elem = LinComb<G::Key, S>;
    type Coord = G::Key;

    fn zero(&self) -> Self::Elem {
        LinComb::zero()
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.add(b)
    }
    fn scale(&self, a: &Self::Elem, c: &S) -> Self::Elem {
        a.scale(c)
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.is_zero()
    }
    fn components(&self, a: &Self::Elem) -> Vec<(i32, Self::Elem)> {
        split_by_degree(self.vd.lie(), a).into_iter().collect()
    }
    fn coordinates(&self, a: &Self::Elem) -> Vec<(G::Key, S)> {
        a.iter().map(|(k, c)| (k.clone(), c.clone())).collect()
    }
    fn curvature(&self) -> Result<Self::Elem> {
        Ok(self.vd.curvature()?.lift())
    }
    fn bracket(&self, args: &[Self::Elem]) -> Result<Self::Elem> {
        for a in args {
            if !self.vd.is_in_abelian(a) {
                return Err(Error::NotInAbelian(format!("{a:?}")));
            }
        }
        let delta: LinComb<G::Key, S> = self.vd.delta().lift();
        let t = nested_bracket(self.vd.lie(), &delta, args)?;
        self.vd.project(&t)
    }
    fn series_bound(&self, fixed: &[Self::Elem], phi: &Self::Elem) -> Result<usize> {
        let delta: LinComb<G::Key, S> = self.vd.delta().lift();
        let t0 = nested_bracket(self.vd.lie(), &delta, fixed)?;
        // With t_k = ad_φ^k t_0 vanishing from k = len on, brackets of arity r + k vanish for k >= len.
        let len = self.chain_length(&t0, phi)?;
        Ok(len.saturating_sub(1))
    }
}
