//! Coderivations of the tensor and symmetric coalgebras of a graded space `W`, stored by
//! their Taylor coefficients `Q¹_n : W^{⊗n} -> W` (or `S^n W -> W`).
//!
//! Coalgebras are truncated at a word-length cutoff. Taylor coefficients of arity at least
//! `cutoff + 1` span an ideal of the reduced algebras, so [`Overflow::Quotient`] computes in the
//! quotient by that ideal; [`Overflow::Strict`] refuses to produce such terms.

use super::GradedLie;
use crate::error::{Error, Result};
use crate::graded_core::{block_to_front_sign, q, subsets, GradedSpace, LinComb, MultilinearMap, Rational};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    Tensor,
    Symmetric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Overflow {
    Strict,
    Quotient,
}

/// Taylor coefficient sending the basis word (or sorted monomial) `inputs` to `e_output`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoderKey {
    pub inputs: Vec<u16>,
    pub output: u16,
}

impl CoderKey {
    pub fn new(inputs: Vec<u16>, output: u16) -> Self {
        CoderKey { inputs, output }
    }

    pub fn arity(&self) -> usize {
        self.inputs.len()
    }
}

pub type Word = Vec<u16>;
pub type CoalgebraElement = LinComb<Word>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoderAlgebra {
    flavor: Flavor,
    space: GradedSpace,
    min_arity: usize,
    cutoff: usize,
    overflow: Overflow,
}

fn sign_q(s: i32) -> Rational {
    q(s as i64)
}

fn parity(e: i32) -> i32 {
    if e.rem_euclid(2) == 1 {
        -1
    } else {
        1
    }
}

impl CoderAlgebra {
    /// `min_arity` is 1 for the reduced coalgebra and 0 when the counit is kept.
    pub fn new(flavor: Flavor, space: GradedSpace, min_arity: usize, cutoff: usize, overflow: Overflow) -> Result<Self> {
        if min_arity > 1 {
            return Err(Error::Input("minimal arity must be 0 or 1".into()));
        }
        if cutoff < 1 {
            return Err(Error::Input("cutoff must be at least 1".into()));
        }
        if space.dim() > u16::MAX as usize {
            return Err(Error::SizeMismatch("space too large".into()));
        }
        Ok(CoderAlgebra { flavor, space, min_arity, cutoff, overflow })
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }
    pub fn space(&self) -> &GradedSpace {
        &self.space
    }
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }
    pub fn min_arity(&self) -> usize {
        self.min_arity
    }
    pub fn overflow(&self) -> Overflow {
        self.overflow
    }

    pub fn with_cutoff(&self, cutoff: usize) -> Self {
        CoderAlgebra { cutoff, ..self.clone() }
    }

    pub fn with_overflow(&self, overflow: Overflow) -> Self {
        CoderAlgebra { overflow, ..self.clone() }
    }

    pub fn word_degree(&self, w: &[u16]) -> i32 {
        w.iter().map(|&i| self.space.degree(i as usize)).sum()
    }

    pub fn key_degree(&self, k: &CoderKey) -> i32 {
        self.space.degree(k.output as usize) - self.word_degree(&k.inputs)
    }

    /// Puts a word in normal form: unchanged for tensors, sorted with Koszul sign for the
    /// symmetric flavor (`None` when an odd letter repeats).
    pub fn normalize(&self, w: &[u16]) -> Option<(i32, Word)> {
        match self.flavor {
            Flavor::Tensor => Some((1, w.to_vec())),
            Flavor::Symmetric => {
                let ws: Vec<usize> = w.iter().map(|&i| i as usize).collect();
                crate::graded_core::canonical_symmetric(&self.space, &ws)
                    .map(|(s, v)| (s, v.into_iter().map(|i| i as u16).collect()))
            }
        }
    }

    /// All normal-form words of the given length.
    pub fn words(&self, len: usize) -> Vec<Word> {
        let d = self.space.dim() as u16;
        let mut out: Vec<Word> = vec![vec![]];
        for _ in 0..len {
            let mut next = Vec::new();
            for w in &out {
                let start = match self.flavor {
                    Flavor::Tensor => 0,
                    Flavor::Symmetric => *w.last().unwrap_or(&0),
                };
                for i in start..d {
                    if self.flavor == Flavor::Symmetric && w.last() == Some(&i) && self.space.is_odd(i as usize) {
                        continue;
                    }
                    let mut w2 = w.clone();
                    w2.push(i);
                    next.push(w2);
                }
            }
            out = next;
        }
        out
    }

    fn place(&self, k: CoderKey, c: Rational, out: &mut LinComb<CoderKey>) -> Result<()> {
        if k.arity() > self.cutoff {
            return match self.overflow {
                Overflow::Strict => Err(Error::CutoffOverflow { arity: k.arity(), cutoff: self.cutoff }),
                Overflow::Quotient => Ok(()),
            };
        }
        out.add_term(k, c);
        Ok(())
    }

    /// Taylor coefficient of the composite `f ∘ ḡ`, where `ḡ` is the coderivation of `g`.
    fn compose_keys(&self, f: &CoderKey, g: &CoderKey, out: &mut LinComb<CoderKey>, scale: i32) -> Result<()> {
        match self.flavor {
            Flavor::Tensor => {
                let gdeg = self.key_degree(g);
                for s in 0..f.inputs.len() {
                    if f.inputs[s] != g.output {
                        continue;
                    }
                    let mut w = f.inputs[..s].to_vec();
                    w.extend_from_slice(&g.inputs);
                    w.extend_from_slice(&f.inputs[s + 1..]);
                    let sign = parity(gdeg * self.word_degree(&f.inputs[..s]));
                    self.place(CoderKey::new(w, f.output), sign_q(sign * scale), out)?;
                }
                Ok(())
            }
            Flavor::Symmetric => {
                let Some(pos) = f.inputs.iter().position(|&i| i == g.output) else { return Ok(()) };
                let mut m: Word = f.inputs.clone();
                m.remove(pos);
                m.extend_from_slice(&g.inputs);
                m.sort_unstable();
                if m.windows(2).any(|w| w[0] == w[1] && self.space.is_odd(w[0] as usize)) {
                    return Ok(());
                }
                let degs: Vec<i32> = m.iter().map(|&i| self.space.degree(i as usize)).collect();
                let mut coeff = 0i64;
                for t in subsets(m.len(), g.inputs.len()) {
                    let sub: Word = t.iter().map(|&i| m[i]).collect();
                    if sub != g.inputs {
                        continue;
                    }
                    let eps = block_to_front_sign(&t, &degs);
                    let mut w: Word = vec![g.output];
                    w.extend((0..m.len()).filter(|i| !t.contains(i)).map(|i| m[i]));
                    if let Some((s, w2)) = self.normalize(&w) {
                        debug_assert_eq!(w2, f.inputs);
                        coeff += (eps * s) as i64;
                    }
                }
                if coeff != 0 {
                    self.place(CoderKey::new(m, f.output), q(coeff * scale as i64), out)?;
                }
                Ok(())
            }
        }
    }
}

impl GradedLie for CoderAlgebra {
    type Key = CoderKey;

    fn degree(&self, key: &CoderKey) -> i32 {
        self.key_degree(key)
    }

    fn bracket_keys(&self, f: &CoderKey, g: &CoderKey) -> Result<LinComb<CoderKey>> {
        let mut out = LinComb::zero();
        self.compose_keys(f, g, &mut out, 1)?;
        let s = -parity(self.key_degree(f) * self.key_degree(g));
        self.compose_keys(g, f, &mut out, s)?;
        Ok(out)
    }

    fn basis(&self, degree: i32) -> Vec<CoderKey> {
        let mut out = Vec::new();
        for n in self.min_arity..=self.cutoff {
            for w in self.words(n) {
                let wd = self.word_degree(&w);
                for o in 0..self.space.dim() {
                    if self.space.degree(o) - wd == degree {
                        out.push(CoderKey::new(w.clone(), o as u16));
                    }
                }
            }
        }
        out
    }

    fn degree_range(&self) -> (i32, i32) {
        let degs = self.space.degrees();
        if degs.is_empty() {
            return (0, -1);
        }
        let (lo, hi) = (*degs.iter().min().unwrap(), *degs.iter().max().unwrap());
        let mut range = (i32::MAX, i32::MIN);
        for n in self.min_arity as i32..=self.cutoff as i32 {
            range.0 = range.0.min(lo - n * hi);
            range.1 = range.1.max(hi - n * lo);
        }
        range
    }
}

/// A coderivation given by finitely many Taylor coefficients, acting on truncated words.
#[derive(Clone, Debug, PartialEq)]
pub struct Coderivation {
    algebra: CoderAlgebra,
    coeffs: LinComb<CoderKey>,
}

impl Coderivation {
    pub fn new(algebra: CoderAlgebra, coeffs: LinComb<CoderKey>) -> Result<Self> {
        for k in coeffs.keys() {
            if k.arity() < algebra.min_arity {
                return Err(Error::Input("arity-0 coefficient in a reduced coalgebra".into()));
            }
            if k.arity() > algebra.cutoff {
                return Err(Error::CutoffOverflow { arity: k.arity(), cutoff: algebra.cutoff });
            }
            if algebra.normalize(&k.inputs).map(|(_, w)| w) != Some(k.inputs.clone()) {
                return Err(Error::Input("coefficient inputs are not in normal form".into()));
            }
        }
        Ok(Coderivation { algebra, coeffs })
    }

    /// Builds a coderivation from Taylor coefficients given as multilinear maps on `W`.
    pub fn from_taylor(algebra: CoderAlgebra, maps: &[MultilinearMap]) -> Result<Self> {
        let mut coeffs = LinComb::zero();
        for m in maps {
            if m.source() != algebra.space() || m.target() != algebra.space() {
                return Err(Error::BaseMismatch("Taylor coefficient on a different space".into()));
            }
            let table = match algebra.flavor {
                Flavor::Tensor => m.to_full_table(),
                Flavor::Symmetric => m.to_symmetric()?,
            };
            for (inp, v) in table.entries() {
                let w: Word = inp.iter().map(|&i| i as u16).collect();
                for (o, c) in v.iter() {
                    coeffs.add_term(CoderKey::new(w.clone(), *o as u16), c.clone());
                }
            }
        }
        Self::new(algebra, coeffs)
    }

    pub fn algebra(&self) -> &CoderAlgebra {
        &self.algebra
    }

    pub fn coeffs(&self) -> &LinComb<CoderKey> {
        &self.coeffs
    }

    /// The arity-`n` Taylor coefficient as a multilinear map of the given degree.
    pub fn taylor(&self, n: usize, degree: i32) -> Result<MultilinearMap> {
        let sp = self.algebra.space.clone();
        let symmetric = self.algebra.flavor == Flavor::Symmetric;
        let mut m = MultilinearMap::new(sp.clone(), sp, n, degree, symmetric);
        for (k, c) in self.coeffs.iter() {
            if k.arity() == n {
                let inp: Vec<usize> = k.inputs.iter().map(|&i| i as usize).collect();
                m.add_entry(&inp, k.output as usize, c.clone())?;
            }
        }
        Ok(m)
    }

    pub fn degrees(&self) -> Vec<i32> {
        let mut d: Vec<i32> = self.coeffs.keys().map(|k| self.algebra.key_degree(k)).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    fn homogeneous_degree(&self) -> Result<i32> {
        match self.degrees().as_slice() {
            [] => Ok(0),
            [d] => Ok(*d),
            _ => Err(Error::Degree("coderivation is not homogeneous".into())),
        }
    }

    fn index(&self) -> BTreeMap<&Word, Vec<(&CoderKey, &Rational)>> {
        let mut idx: BTreeMap<&Word, Vec<(&CoderKey, &Rational)>> = BTreeMap::new();
        for (k, c) in self.coeffs.iter() {
            idx.entry(&k.inputs).or_default().push((k, c));
        }
        idx
    }

    /// The full action on a normal-form word.
    pub fn apply_word(&self, w: &[u16]) -> CoalgebraElement {
        let alg = &self.algebra;
        let idx = self.index();
        let mut out = CoalgebraElement::zero();
        match alg.flavor {
            Flavor::Tensor => {
                for (inputs, keys) in &idx {
                    let k = inputs.len();
                    if k > w.len() {
                        continue;
                    }
                    for s in 0..=w.len() - k {
                        if &w[s..s + k] != inputs.as_slice() {
                            continue;
                        }
                        let prefix_deg = alg.word_degree(&w[..s]);
                        for (key, c) in keys {
                            let sign = parity(alg.key_degree(key) * prefix_deg);
                            let mut r = w[..s].to_vec();
                            r.push(key.output);
                            r.extend_from_slice(&w[s + k..]);
                            out.add_term(r, (*c).clone() * sign_q(sign));
                        }
                    }
                }
            }
            Flavor::Symmetric => {
                let degs: Vec<i32> = w.iter().map(|&i| alg.space.degree(i as usize)).collect();
                let sizes: std::collections::BTreeSet<usize> = idx.keys().map(|k| k.len()).collect();
                for k in sizes {
                    if k > w.len() {
                        continue;
                    }
                    for t in subsets(w.len(), k) {
                        let sub: Word = t.iter().map(|&i| w[i]).collect();
                        let Some(keys) = idx.get(&sub) else { continue };
                        let eps = block_to_front_sign(&t, &degs);
                        for (key, c) in keys {
                            let mut r: Word = vec![key.output];
                            r.extend((0..w.len()).filter(|i| !t.contains(i)).map(|i| w[i]));
                            if let Some((s, r2)) = alg.normalize(&r) {
                                out.add_term(r2, (*c).clone() * sign_q(eps * s));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, x: &CoalgebraElement) -> CoalgebraElement {
        let mut out = CoalgebraElement::zero();
        for (w, c) in x.iter() {
            out.add_scaled(&self.apply_word(w), c);
        }
        out
    }

    /// The coproduct of a normal-form word: deconcatenation, or unshuffles with Koszul signs.
    pub fn coproduct(alg: &CoderAlgebra, w: &[u16]) -> LinComb<(Word, Word)> {
        let mut out = LinComb::zero();
        let lo = if alg.min_arity == 0 { 0 } else { 1 };
        let hi = if alg.min_arity == 0 { w.len() } else { w.len().saturating_sub(1) };
        if lo > hi {
            return out;
        }
        match alg.flavor {
            Flavor::Tensor => {
                for i in lo..=hi {
                    out.add_term((w[..i].to_vec(), w[i..].to_vec()), q(1));
                }
            }
            Flavor::Symmetric => {
                let degs: Vec<i32> = w.iter().map(|&i| alg.space.degree(i as usize)).collect();
                for i in lo..=hi {
                    for t in subsets(w.len(), i) {
                        let a: Word = t.iter().map(|&k| w[k]).collect();
                        let b: Word = (0..w.len()).filter(|k| !t.contains(k)).map(|k| w[k]).collect();
                        out.add_term((a, b), sign_q(block_to_front_sign(&t, &degs)));
                    }
                }
            }
        }
        out
    }

    /// Checks `Δ∘Q = (Q⊗1 + 1⊗Q)∘Δ` on every normal-form word up to the cutoff, returning
    /// a failing word.
    pub fn check_coleibniz(&self) -> Result<Option<Word>> {
        let alg = &self.algebra;
        let dq = self.homogeneous_degree()?;
        for n in alg.min_arity..=alg.cutoff {
            for w in alg.words(n) {
                let mut lhs: LinComb<(Word, Word)> = LinComb::zero();
                for (r, c) in self.apply_word(&w).iter() {
                    lhs.add_scaled(&Self::coproduct(alg, r), c);
                }
                let mut rhs: LinComb<(Word, Word)> = LinComb::zero();
                for ((a, b), c) in Self::coproduct(alg, &w).iter() {
                    for (qa, ca) in self.apply_word(a).iter() {
                        rhs.add_term((qa.clone(), b.clone()), c * ca);
                    }
                    let sign = sign_q(parity(dq * alg.word_degree(a)));
                    for (qb, cb) in self.apply_word(b).iter() {
                        rhs.add_term((a.clone(), qb.clone()), c * cb * &sign);
                    }
                }
                if lhs != rhs {
                    return Ok(Some(w));
                }
            }
        }
        Ok(None)
    }

    /// `Q∘Q` vanishes on all normal-form words up to the cutoff.
    pub fn is_homological(&self) -> bool {
        let alg = &self.algebra;
        (alg.min_arity..=alg.cutoff).all(|n| alg.words(n).iter().all(|w| self.apply(&self.apply_word(w)).is_zero()))
    }

    /// Taylor coefficients of the graded commutator, read off by projecting the composite
    /// actions onto `W`. Terms of arity above the cutoff are an error.
    pub fn commutator(a: &Coderivation, b: &Coderivation) -> Result<Coderivation> {
        if a.algebra != b.algebra {
            return Err(Error::BaseMismatch("coderivations of different coalgebras".into()));
        }
        let alg = &a.algebra;
        let max_a = a.coeffs.keys().map(|k| k.arity()).max();
        let max_b = b.coeffs.keys().map(|k| k.arity()).max();
        if let (Some(p), Some(r)) = (max_a, max_b) {
            if p + r > alg.cutoff + 1 {
                return Err(Error::CutoffOverflow { arity: p + r - 1, cutoff: alg.cutoff });
            }
        }
        let (da, db) = (a.homogeneous_degree()?, b.homogeneous_degree()?);
        let sign = sign_q(-parity(da * db));
        let mut coeffs = LinComb::zero();
        for n in alg.min_arity..=alg.cutoff {
            for w in alg.words(n) {
                let word = CoalgebraElement::single(w.clone());
                let v = a.apply(&b.apply(&word)).add(&b.apply(&a.apply(&word)).scale(&sign));
                for (r, c) in v.iter() {
                    if r.len() == 1 {
                        coeffs.add_term(CoderKey::new(w.clone(), r[0]), c.clone());
                    }
                }
            }
        }
        Coderivation::new(alg.clone(), coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded_lie::{bracket, check_lie_axioms};

    fn mixed_space() -> GradedSpace {
        GradedSpace::new(vec![-1, 0, -1])
    }

    #[test]
    fn key_bracket_matches_commutator_of_actions() {
        for flavor in [Flavor::Tensor, Flavor::Symmetric] {
            for min in [0, 1] {
                let alg = CoderAlgebra::new(flavor, mixed_space(), min, 3, Overflow::Strict).unwrap();
                let small = alg.with_cutoff(2);
                let mut keys: Vec<CoderKey> = Vec::new();
                let (lo, hi) = small.degree_range();
                for d in lo..=hi {
                    keys.extend(small.basis(d));
                }
                for a in &keys {
                    for b in &keys {
                        let x = Coderivation::new(alg.clone(), LinComb::single(a.clone())).unwrap();
                        let y = Coderivation::new(alg.clone(), LinComb::single(b.clone())).unwrap();
                        let via_actions = Coderivation::commutator(&x, &y).unwrap();
                        let via_keys =
                            bracket(&alg, &LinComb::single(a.clone()), &LinComb::single(b.clone())).unwrap();
                        assert_eq!(via_actions.coeffs(), &via_keys, "{flavor:?} {a:?} {b:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn every_taylor_coefficient_gives_a_coderivation() {
        for flavor in [Flavor::Tensor, Flavor::Symmetric] {
            for min in [0, 1] {
                let alg = CoderAlgebra::new(flavor, mixed_space(), min, 3, Overflow::Strict).unwrap();
                let (lo, hi) = alg.with_cutoff(2).degree_range();
                for d in lo..=hi {
                    for k in alg.with_cutoff(2).basis(d) {
                        let x = Coderivation::new(alg.clone(), LinComb::single(k.clone())).unwrap();
                        assert_eq!(x.check_coleibniz().unwrap(), None, "{flavor:?} {k:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn lie_axioms_in_the_quotient() {
        for flavor in [Flavor::Tensor, Flavor::Symmetric] {
            let alg = CoderAlgebra::new(flavor, GradedSpace::new(vec![-1, 0]), 1, 2, Overflow::Quotient).unwrap();
            let (lo, hi) = alg.degree_range();
            let keys: Vec<CoderKey> = (lo..=hi).flat_map(|d| alg.basis(d)).collect();
            assert_eq!(check_lie_axioms(&alg, &keys).unwrap(), None);
        }
    }

    #[test]
    fn strict_overflow_is_reported() {
        let alg = CoderAlgebra::new(Flavor::Tensor, GradedSpace::new(vec![-1]), 1, 2, Overflow::Strict).unwrap();
        let m = CoderKey::new(vec![0, 0], 0);
        assert_eq!(alg.bracket_keys(&m, &m), Err(Error::CutoffOverflow { arity: 3, cutoff: 2 }));
        let x = Coderivation::new(alg, LinComb::single(m)).unwrap();
        assert!(matches!(Coderivation::commutator(&x, &x), Err(Error::CutoffOverflow { .. })));
    }

    #[test]
    fn symmetric_coproduct_counts() {
        let alg = CoderAlgebra::new(Flavor::Symmetric, GradedSpace::new(vec![0, 0, 0]), 1, 3, Overflow::Strict).unwrap();
        // Reduced coproduct of a word of length 3 has 2^3 - 2 terms.
        assert_eq!(Coderivation::coproduct(&alg, &[0, 1, 2]).len(), 6);
    }
}
