//! The L∞[1] algebra on `L[1] ⊕ a` attached to flat V-data.

use super::linf::LInfinity;
use super::VData;
use crate::error::{Error, Result};
use crate::graded_core::{Coeff, LinComb};
use crate::graded_lie::{bracket, nested_bracket, split_by_degree, GradedLie};

/// `(x[1], a)`. The `l` part is stored with its `L`-keys; its degree in `L[1]` is one less.
#[derive(Clone, Debug, PartialEq)]
pub struct BigElem<K: Ord, S> {
    pub l: LinComb<K, S>,
    pub a: LinComb<K, S>,
}

impl<K: Ord + Clone + std::fmt::Debug, S: Coeff> BigElem<K, S> {
    pub fn new(l: LinComb<K, S>, a: LinComb<K, S>) -> Self {
        BigElem { l, a }
    }

    pub fn from_l(l: LinComb<K, S>) -> Self {
        BigElem { l, a: LinComb::zero() }
    }

    pub fn from_a(a: LinComb<K, S>) -> Self {
        BigElem { l: LinComb::zero(), a }
    }
}

impl<K: Ord + Clone + std::fmt::Debug, S: Coeff> Default for BigElem<K, S> {
    fn default() -> Self {
        BigElem { l: LinComb::default(), a: LinComb::default() }
    }
}

pub struct BigAlgebra<'a, G: GradedLie> {
    vd: &'a VData<G>,
}

#[derive(Clone)]
enum Piece<K: Ord, S> {
    L(i32, LinComb<K, S>),
    A(i32, LinComb<K, S>),
}

impl<K: Ord, S> Piece<K, S> {
    /// Degree in `L[1] ⊕ a`.
    fn degree(&self) -> i32 {
        match self {
            Piece::L(d, _) => d - 1,
            Piece::A(d, _) => *d,
        }
    }
}

impl<'a, G: GradedLie> BigAlgebra<'a, G> {
    /// Fails with [`Error::CurvedRejected`] unless `P Δ = 0`.
    pub fn new(vd: &'a VData<G>) -> Result<Self> {
        if !vd.is_flat()? {
            return Err(Error::CurvedRejected);
        }
        Ok(BigAlgebra { vd })
    }

    fn pieces<S: Coeff>(&self, x: &BigElem<G::Key, S>) -> Vec<Piece<G::Key, S>> {
        let lie = self.vd.lie();
        let mut out: Vec<Piece<G::Key, S>> =
            split_by_degree(lie, &x.l).into_iter().map(|(d, v)| Piece::L(d, v)).collect();
        out.extend(split_by_degree(lie, &x.a).into_iter().map(|(d, v)| Piece::A(d, v)));
        out
    }

    fn bracket_homogeneous<S: Coeff>(&self, args: &[Piece<G::Key, S>]) -> Result<BigElem<G::Key, S>> {
        let lie = self.vd.lie();
        let n = args.len();
        let l_pos: Vec<usize> = (0..n).filter(|&i| matches!(args[i], Piece::L(..))).collect();
        let a_of = |p: &Piece<G::Key, S>| match p {
            Piece::A(_, v) => v.clone(),
            Piece::L(..) => unreachable!(),
        };
        match l_pos.len() {
            0 => {
                if n == 0 {
                    return Ok(BigElem::default());
                }
                let list: Vec<_> = args.iter().map(a_of).collect();
                let delta: LinComb<G::Key, S> = self.vd.delta().lift();
                Ok(BigElem::from_a(self.vd.project(&nested_bracket(lie, &delta, &list)?)?))
            }
            1 => {
                let i = l_pos[0];
                let Piece::L(dx, x) = &args[i] else { unreachable!() };
                if n == 1 {
                    let delta: LinComb<G::Key, S> = self.vd.delta().lift();
                    return Ok(BigElem::new(bracket(lie, &delta, x)?.neg(), self.vd.project(x)?));
                }
                // Move x[1] to the front past the a's before it.
                let before: i32 = args[..i].iter().map(|p| p.degree()).sum();
                let sign = if ((dx - 1) * before).rem_euclid(2) == 1 { -1 } else { 1 };
                let list: Vec<_> = args.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| a_of(p)).collect();
                let v = self.vd.project(&nested_bracket(lie, x, &list)?)?;
                Ok(BigElem::from_a(if sign < 0 { v.neg() } else { v }))
            }
            2 if n == 2 => {
                let (Piece::L(dx, x), Piece::L(_, y)) = (&args[0], &args[1]) else { unreachable!() };
                let v = bracket(lie, x, y)?;
                Ok(BigElem::from_l(if dx.rem_euclid(2) == 1 { v.neg() } else { v }))
            }
            _ => Ok(BigElem::default()),
        }
    }
}

impl<'a, G: GradedLie, S: Coeff> LInfinity<S> for BigAlgebra<'a, G> {
    type Elem = BigElem<G::Key, S>;
    /// `(false, key)` for the `L[1]` summand, `(true, key)` for `a`.
    type Coord = (bool, G::Key);

    fn zero(&self) -> Self::Elem {
        BigElem::default()
    }
    fn add(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        BigElem::new(x.l.add(&y.l), x.a.add(&y.a))
    }
    fn scale(&self, x: &Self::Elem, c: &S) -> Self::Elem {
        BigElem::new(x.l.scale(c), x.a.scale(c))
    }
    fn is_zero(&self, x: &Self::Elem) -> bool {
        x.l.is_zero() && x.a.is_zero()
    }
    fn components(&self, x: &Self::Elem) -> Vec<(i32, Self::Elem)> {
        let mut by: std::collections::BTreeMap<i32, Self::Elem> = Default::default();
        for p in self.pieces(x) {
            let d = p.degree();
            let e = by.entry(d).or_default();
            match p {
                Piece::L(_, v) => e.l = e.l.add(&v),
                Piece::A(_, v) => e.a = e.a.add(&v),
            }
        }
        by.into_iter().collect()
    }
    fn coordinates(&self, x: &Self::Elem) -> Vec<((bool, G::Key), S)> {
        let mut out: Vec<_> = x.l.iter().map(|(k, c)| ((false, k.clone()), c.clone())).collect();
        out.extend(x.a.iter().map(|(k, c)| ((true, k.clone()), c.clone())));
        out
    }
    fn curvature(&self) -> Result<Self::Elem> {
        Ok(BigElem::default())
    }
    fn bracket(&self, args: &[Self::Elem]) -> Result<Self::Elem> {
        for x in args {
            if !self.vd.is_in_abelian(&x.a) {
                return Err(Error::NotInAbelian(format!("{:?}", x.a)));
            }
        }
        let expanded: Vec<Vec<Piece<G::Key, S>>> = args.iter().map(|x| self.pieces(x)).collect();
        if expanded.iter().any(|p| p.is_empty()) {
            return Ok(BigElem::default());
        }
        let mut total = BigElem::default();
        let mut choice = vec![0usize; args.len()];
        loop {
            let picked: Vec<Piece<G::Key, S>> = choice.iter().enumerate().map(|(i, &c)| expanded[i][c].clone()).collect();
            let l_count = picked.iter().filter(|p| matches!(p, Piece::L(..))).count();
            if l_count <= 2 {
                let v = self.bracket_homogeneous(&picked)?;
                total = LInfinity::<S>::add(self, &total, &v);
            }
            let mut i = 0;
            loop {
                if i == choice.len() {
                    return Ok(total);
                }
                choice[i] += 1;
                if choice[i] < expanded[i].len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }
    /// Weight bookkeeping: a non-zero `P[...[h, a_1], ..., a_k]` needs `wt(h) + k <= max` when
    /// every `a_i` coming from `phi` has weight at least 1, and at most two `L[1]` arguments occur.
    fn series_bound(&self, fixed: &[Self::Elem], phi: &Self::Elem) -> Result<usize> {
        let w = self.vd.weight().ok_or_else(|| {
            Error::UnverifiableTruncation("the algebra on L[1] ⊕ a needs a weight to bound Maurer-Cartan series".into())
        })?;
        if phi.a.keys().any(|k| w.of(k) < 1) {
            return Err(Error::UnverifiableTruncation("a-part of the element has weight below 1".into()));
        }
        let delta = self.vd.delta();
        let mut heads: Vec<i32> = delta.keys().map(|k| w.of(k)).collect();
        heads.extend(phi.l.keys().map(|k| w.of(k)));
        for f in fixed {
            heads.extend(f.l.keys().map(|k| w.of(k)));
        }
        let min_head = heads.into_iter().min().unwrap_or(w.max);
        Ok((w.max - min_head + 2).max(2) as usize)
    }
}
