//! Sparse multilinear maps between graded spaces, graded symmetry checks and décalage.

use super::lincomb::LinComb;
use super::perm::{koszul_sign, Permutation};
use super::scalar::{q, Rational};
use super::space::GradedSpace;
use crate::error::{Error, Result};
use num_traits::Zero;
use std::collections::BTreeMap;

pub type Vector = LinComb<usize>;

/// A homogeneous multilinear map `source^{⊗n} -> target` of a fixed degree.
///
/// With `symmetric` set, inputs are stored sorted and the map is understood as a map
/// out of the graded-symmetric power; evaluation applies the Koszul sign of sorting.
#[derive(Clone, Debug, PartialEq)]
pub struct MultilinearMap {
    source: GradedSpace,
    target: GradedSpace,
    arity: usize,
    degree: i32,
    symmetric: bool,
    entries: BTreeMap<Vec<usize>, Vector>,
}

/// Sorts a list of basis indices, returning the Koszul sign, or `None` if an odd
/// element repeats (the product vanishes in the symmetric power).
pub fn canonical_symmetric(space: &GradedSpace, inputs: &[usize]) -> Option<(i32, Vec<usize>)> {
    let mut idx: Vec<usize> = (0..inputs.len()).collect();
    idx.sort_by_key(|&i| (inputs[i], i));
    let degs: Vec<i32> = inputs.iter().map(|&i| space.degree(i)).collect();
    let perm = Permutation::from_images(idx.clone()).expect("sorting yields a permutation");
    let sorted: Vec<usize> = idx.iter().map(|&i| inputs[i]).collect();
    for w in sorted.windows(2) {
        if w[0] == w[1] && space.is_odd(w[0]) {
            return None;
        }
    }
    Some((koszul_sign(&perm, &degs), sorted))
}

impl MultilinearMap {
    pub fn new(source: GradedSpace, target: GradedSpace, arity: usize, degree: i32, symmetric: bool) -> Self {
        MultilinearMap { source, target, arity, degree, symmetric, entries: BTreeMap::new() }
    }

    pub fn source(&self) -> &GradedSpace {
        &self.source
    }
    pub fn target(&self) -> &GradedSpace {
        &self.target
    }
    pub fn arity(&self) -> usize {
        self.arity
    }
    pub fn degree(&self) -> i32 {
        self.degree
    }
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Stored entries: input tuple (sorted when symmetric) to output vector.
    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Vector)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds `c * e_out` to the value on the basis tuple `inputs`.
    pub fn add_entry(&mut self, inputs: &[usize], out: usize, c: Rational) -> Result<()> {
        if inputs.len() != self.arity {
            return Err(Error::SizeMismatch(format!("expected {} inputs, got {}", self.arity, inputs.len())));
        }
        if out >= self.target.dim() || inputs.iter().any(|&i| i >= self.source.dim()) {
            return Err(Error::SizeMismatch("basis index out of range".into()));
        }
        let in_deg: i32 = inputs.iter().map(|&i| self.source.degree(i)).sum();
        if self.target.degree(out) != in_deg + self.degree {
            return Err(Error::Degree(format!(
                "entry {inputs:?} -> {out} has degree {} but the map has degree {}",
                self.target.degree(out) - in_deg,
                self.degree
            )));
        }
        let (sign, key) = if self.symmetric {
            match canonical_symmetric(&self.source, inputs) {
                Some(x) => x,
                None => return Ok(()),
            }
        } else {
            (1, inputs.to_vec())
        };
        let entry = self.entries.entry(key.clone()).or_default();
        entry.add_term(out, c * q(sign as i64));
        if entry.is_zero() {
            self.entries.remove(&key);
        }
        Ok(())
    }

    pub fn eval_basis(&self, inputs: &[usize]) -> Vector {
        if self.symmetric {
            match canonical_symmetric(&self.source, inputs) {
                Some((sign, key)) => self.entries.get(&key).map(|v| v.scale(&q(sign as i64))).unwrap_or_default(),
                None => Vector::zero(),
            }
        } else {
            self.entries.get(inputs).cloned().unwrap_or_default()
        }
    }

    pub fn eval(&self, args: &[Vector]) -> Result<Vector> {
        if args.len() != self.arity {
            return Err(Error::SizeMismatch(format!("expected {} arguments, got {}", self.arity, args.len())));
        }
        let mut out = Vector::zero();
        let mut idx = Vec::with_capacity(self.arity);
        fn rec(m: &MultilinearMap, args: &[Vector], idx: &mut Vec<usize>, c: Rational, out: &mut Vector) {
            if idx.len() == args.len() {
                out.add_scaled(&m.eval_basis(idx), &c);
                return;
            }
            for (k, v) in args[idx.len()].iter() {
                idx.push(*k);
                rec(m, args, idx, &c * v, out);
                idx.pop();
            }
        }
        rec(self, args, &mut idx, q(1), &mut out);
        Ok(out)
    }

    /// Every basis tuple of the source, in lexicographic order.
    pub fn all_tuples(&self) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..self.arity {
            out = out
                .into_iter()
                .flat_map(|t| {
                    (0..self.source.dim()).map(move |i| {
                        let mut t2 = t.clone();
                        t2.push(i);
                        t2
                    })
                })
                .collect();
        }
        out
    }

    /// The same map with every tuple stored explicitly.
    pub fn to_full_table(&self) -> MultilinearMap {
        if !self.symmetric {
            return self.clone();
        }
        let mut full = MultilinearMap::new(self.source.clone(), self.target.clone(), self.arity, self.degree, false);
        for t in self.all_tuples() {
            let v = self.eval_basis(&t);
            if !v.is_zero() {
                full.entries.insert(t, v);
            }
        }
        full
    }

    fn check_exchange(&self, extra: i32) -> bool {
        for t in self.all_tuples() {
            let v = self.eval_basis(&t);
            for i in 0..self.arity.saturating_sub(1) {
                let mut s = t.clone();
                s.swap(i, i + 1);
                let exp = self.source.degree(t[i]) * self.source.degree(t[i + 1]);
                let sign = if exp.rem_euclid(2) == 1 { -extra } else { extra };
                let w = self.eval_basis(&s);
                if w.scale(&q(sign as i64)) != v {
                    return false;
                }
            }
        }
        true
    }

    /// Brute-force check of `f(.., x, y, ..) = (-1)^{|x||y|} f(.., y, x, ..)`.
    pub fn is_graded_symmetric(&self) -> bool {
        self.check_exchange(1)
    }

    pub fn is_graded_antisymmetric(&self) -> bool {
        self.check_exchange(-1)
    }

    /// Compresses a graded-symmetric full table to sorted-input storage.
    pub fn to_symmetric(&self) -> Result<MultilinearMap> {
        if self.symmetric {
            return Ok(self.clone());
        }
        if !self.is_graded_symmetric() {
            return Err(Error::Input("map is not graded symmetric".into()));
        }
        let mut out = MultilinearMap::new(self.source.clone(), self.target.clone(), self.arity, self.degree, true);
        for (t, v) in &self.entries {
            if let Some((_, key)) = canonical_symmetric(&self.source, t) {
                if &key == t {
                    out.entries.insert(key, v.clone());
                }
            }
        }
        Ok(out)
    }

    fn decalage_sign(degrees_in_v: &[i32]) -> Rational {
        let n = degrees_in_v.len() as i32;
        let exp: i32 = degrees_in_v.iter().enumerate().map(|(k, d)| (n - 1 - k as i32) * d).sum();
        if exp.rem_euclid(2) == 1 {
            q(-1)
        } else {
            q(1)
        }
    }

    /// Moves a map `V^{⊗n} -> V'` to `V[1]^{⊗n} -> V'[1]`, multiplying each entry by
    /// `(-1)^{(n-1)|v_1| + (n-2)|v_2| + ... + |v_{n-1}|}` (degrees taken in `V`).
    pub fn decalage_to_shifted(&self) -> MultilinearMap {
        let full = self.to_full_table();
        let mut out = MultilinearMap::new(
            self.source.shift(1),
            self.target.shift(1),
            self.arity,
            self.degree + self.arity as i32 - 1,
            false,
        );
        for (t, v) in &full.entries {
            let degs: Vec<i32> = t.iter().map(|&i| self.source.degree(i)).collect();
            out.entries.insert(t.clone(), v.scale(&Self::decalage_sign(&degs)));
        }
        out
    }

    /// Inverse of [`decalage_to_shifted`](Self::decalage_to_shifted).
    pub fn decalage_from_shifted(&self) -> MultilinearMap {
        let full = self.to_full_table();
        let unshifted = self.source.shift(-1);
        let mut out = MultilinearMap::new(
            unshifted.clone(),
            self.target.shift(-1),
            self.arity,
            self.degree - self.arity as i32 + 1,
            false,
        );
        for (t, v) in &full.entries {
            let degs: Vec<i32> = t.iter().map(|&i| unshifted.degree(i)).collect();
            out.entries.insert(t.clone(), v.scale(&Self::decalage_sign(&degs)));
        }
        out
    }

    /// Operadic insertion `f ∘ (g_1 ⊗ ... ⊗ g_n)` of endomorphism-type maps on one space,
    /// with `None` standing for the identity. Signs: `(g_1⊗g_2)(x⊗y) = (-1)^{|g_2||x|} g_1 x ⊗ g_2 y`.
    pub fn insert(&self, slots: &[Option<&MultilinearMap>]) -> Result<MultilinearMap> {
        if slots.len() != self.arity {
            return Err(Error::SizeMismatch("one slot per input is required".into()));
        }
        if slots.iter().flatten().any(|g| g.symmetric || g.source != self.source || g.target != self.source) {
            return Err(Error::BaseMismatch("insertion needs tensor-type maps on a single space".into()));
        }
        let f = self.to_full_table();
        let degree = self.degree + slots.iter().flatten().map(|g| g.degree).sum::<i32>();
        let arity = slots.iter().map(|s| s.map_or(1, |g| g.arity)).sum();
        let mut out = MultilinearMap::new(self.source.clone(), self.target.clone(), arity, degree, false);
        for (inp, val) in &f.entries {
            // For each slot, the list of (input block, coefficient) producing basis vector inp[t].
            let mut choices: Vec<Vec<(Vec<usize>, Rational, i32)>> = Vec::new();
            for (t, slot) in slots.iter().enumerate() {
                match slot {
                    None => choices.push(vec![(vec![inp[t]], q(1), 0)]),
                    Some(g) => {
                        let mut c = Vec::new();
                        for (block, gv) in &g.entries {
                            let coeff = gv.coeff(&inp[t]);
                            if !coeff.is_zero() {
                                c.push((block.clone(), coeff, g.degree));
                            }
                        }
                        choices.push(c);
                    }
                }
            }
            let mut stack: Vec<(Vec<usize>, Rational, i32)> = vec![(vec![], q(1), 0)];
            for c in &choices {
                let mut next = Vec::new();
                for (word, coeff, deg_before) in &stack {
                    for (block, bc, gdeg) in c {
                        let sign = if (gdeg * deg_before).rem_euclid(2) == 1 { q(-1) } else { q(1) };
                        let mut w = word.clone();
                        w.extend_from_slice(block);
                        let bdeg: i32 = block.iter().map(|&i| self.source.degree(i)).sum();
                        next.push((w, coeff * bc * sign, deg_before + bdeg));
                    }
                }
                stack = next;
            }
            for (word, coeff, _) in stack {
                let entry = out.entries.entry(word.clone()).or_default();
                entry.add_scaled(val, &coeff);
                if entry.is_zero() {
                    out.entries.remove(&word);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &MultilinearMap) -> Result<MultilinearMap> {
        if self.source != other.source || self.target != other.target || self.arity != other.arity {
            return Err(Error::BaseMismatch("maps live on different spaces".into()));
        }
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(Error::Degree("cannot add maps of different degree".into()));
        }
        let a = self.to_full_table();
        let b = other.to_full_table();
        let mut out = a.clone();
        if a.is_zero() {
            out.degree = b.degree;
        }
        for (t, v) in &b.entries {
            let e = out.entries.entry(t.clone()).or_default();
            *e = e.add(v);
            if e.is_zero() {
                out.entries.remove(t);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> MultilinearMap {
        let mut out = self.clone();
        out.entries = self
            .entries
            .iter()
            .map(|(t, v)| (t.clone(), v.scale(c)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_mismatch_is_rejected() {
        let v = GradedSpace::concentrated(2, 0);
        let mut m = MultilinearMap::new(v.clone(), v, 2, 1, false);
        assert!(matches!(m.add_entry(&[0, 1], 0, q(1)), Err(Error::Degree(_))));
    }

    #[test]
    fn antisymmetric_bracket_becomes_symmetric_on_the_shift() {
        let v = GradedSpace::concentrated(2, 0);
        let mut b = MultilinearMap::new(v.clone(), v, 2, 0, false);
        b.add_entry(&[0, 1], 0, q(1)).unwrap();
        b.add_entry(&[1, 0], 0, q(-1)).unwrap();
        assert!(b.is_graded_antisymmetric());
        let s = b.decalage_to_shifted();
        assert_eq!(s.degree(), 1);
        assert!(s.is_graded_symmetric());
        assert_eq!(s.decalage_from_shifted(), b);
    }

    #[test]
    fn decalage_sign_of_two_odd_inputs() {
        let v = GradedSpace::concentrated(1, 1);
        let mut m = MultilinearMap::new(v.clone(), GradedSpace::concentrated(1, 2), 2, 0, false);
        m.add_entry(&[0, 0], 0, q(1)).unwrap();
        let s = m.decalage_to_shifted();
        assert_eq!(s.eval_basis(&[0, 0]).coeff(&0), q(-1));
    }

    #[test]
    fn symmetric_storage_applies_koszul_sign() {
        let w = GradedSpace::new(vec![-1, -1]);
        let mut m = MultilinearMap::new(w.clone(), w, 2, 1, true);
        m.add_entry(&[1, 0], 0, q(1)).unwrap();
        assert_eq!(m.eval_basis(&[0, 1]).coeff(&0), q(-1));
        assert_eq!(m.eval_basis(&[1, 0]).coeff(&0), q(1));
        assert!(m.eval_basis(&[0, 0]).is_zero());
    }
}
