use super::scalar::{Coeff, Rational};
use std::collections::BTreeMap;
use std::fmt::Debug;

/// A finite linear combination of basis keys with coefficients in `S`.
/// Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct LinComb<K: Ord, S = Rational> {
    terms: BTreeMap<K, S>,
}

impl<K: Ord + Clone + Debug, S: Coeff> Default for LinComb<K, S> {
    fn default() -> Self {
        LinComb { terms: BTreeMap::new() }
    }
}

impl<K: Ord + Clone + Debug, S: Coeff> LinComb<K, S> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(key: K) -> Self {
        Self::term(key, S::one())
    }

    pub fn term(key: K, c: S) -> Self {
        let mut out = Self::default();
        out.add_term(key, c);
        out
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (K, S)>) -> Self {
        let mut out = Self::default();
        for (k, c) in terms {
            out.add_term(k, c);
        }
        out
    }

    pub fn add_term(&mut self, key: K, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(v) => {
                *v = v.add(&c);
                if v.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &S) {
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v.mul(c));
        }
    }

    pub fn add_scaled_q(&mut self, other: &LinComb<K, Rational>, c: &S) {
        for (k, v) in other.iter() {
            self.add_term(k.clone(), c.scale(v));
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), v.neg());
        }
        out
    }

    pub fn neg(&self) -> Self {
        LinComb { terms: self.terms.iter().map(|(k, v)| (k.clone(), v.neg())).collect() }
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::default();
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v.mul(c));
        }
        out
    }

    pub fn scale_q(&self, c: &Rational) -> Self {
        let mut out = Self::default();
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v.scale(c));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &S)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    pub fn coeff(&self, key: &K) -> S {
        self.terms.get(key).cloned().unwrap_or_else(S::zero)
    }

    pub fn filter(&self, mut keep: impl FnMut(&K) -> bool) -> Self {
        LinComb { terms: self.terms.iter().filter(|(k, _)| keep(k)).map(|(k, v)| (k.clone(), v.clone())).collect() }
    }

    pub fn map_coeffs<T: Coeff>(&self, f: impl Fn(&S) -> T) -> LinComb<K, T> {
        LinComb::from_terms(self.terms.iter().map(|(k, v)| (k.clone(), f(v))))
    }

    /// Applies a linear map given on basis keys.
    pub fn map_linear<K2: Ord + Clone + Debug>(
        &self,
        mut f: impl FnMut(&K) -> LinComb<K2, Rational>,
    ) -> LinComb<K2, S> {
        let mut out = LinComb::default();
        for (k, v) in &self.terms {
            out.add_scaled_q(&f(k), v);
        }
        out
    }
}

impl<K: Ord + Clone + Debug> LinComb<K, Rational> {
    pub fn lift<S: Coeff>(&self) -> LinComb<K, S> {
        self.map_coeffs(S::from_rational)
    }
}
