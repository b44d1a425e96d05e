//! Sparse multivariate polynomials over the rationals, used as a coefficient ring to
//! turn residual maps into explicit polynomial systems.

use super::scalar::{q, to_f64, Coeff, Rational};

use std::collections::BTreeMap;

/// Exponent vector with trailing zeros trimmed.
pub type Monomial = Vec<u16>;

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

fn trim(mut m: Monomial) -> Monomial {
    while m.last() == Some(&0) {
        m.pop();
    }
    m
}

impl Poly {
    pub fn var(i: usize) -> Poly {
        let mut m = vec![0u16; i + 1];
        m[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(m, q(1));
        Poly { terms }
    }

    pub fn constant(c: Rational) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![], c);
        }
        Poly { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> usize {
        self.terms.keys().map(|m| m.iter().map(|&e| e as usize).sum()).max().unwrap_or(0)
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut v = to_f64(c);
                for (i, &e) in m.iter().enumerate() {
                    v *= x[i].powi(e as i32);
                }
                v
            })
            .sum()
    }

    pub fn eval_exact(&self, x: &[Rational]) -> Rational {
        let mut acc = q(0);
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (i, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    v *= &x[i];
                }
            }
            acc += v;
        }
        acc
    }

    /// Partial derivative in variable `i`.
    pub fn derivative(&self, i: usize) -> Poly {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.get(i).copied().unwrap_or(0);
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2[i] -= 1;
            let m2 = trim(m2);
            let entry = terms.entry(m2).or_insert_with(|| q(0));
            *entry += c * q(e as i64);
        }
        terms.retain(|_, c: &mut Rational| !c.is_zero());
        Poly { terms }
    }

    /// Substitutes a constant for variable `i`.
    pub fn substitute(&self, i: usize, value: &Rational) -> Poly {
        let mut out = Poly::default();
        for (m, c) in &self.terms {
            let e = m.get(i).copied().unwrap_or(0);
            let mut m2 = m.clone();
            if e > 0 {
                m2[i] = 0;
            }
            let mut coeff = c.clone();
            for _ in 0..e {
                coeff *= value;
            }
            out.add_term(trim(m2), coeff);
        }
        out
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(|| q(0));
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }
}

impl Coeff for Poly {
    fn zero() -> Self {
        Poly::default()
    }
    fn one() -> Self {
        Poly::constant(q(1))
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
    fn mul(&self, other: &Self) -> Self {
        let mut out = Poly::default();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let n = m1.len().max(m2.len());
                let m: Monomial = (0..n)
                    .map(|i| m1.get(i).copied().unwrap_or(0) + m2.get(i).copied().unwrap_or(0))
                    .collect();
                out.add_term(m, c1 * c2);
            }
        }
        out
    }
    fn neg(&self) -> Self {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
    fn from_rational(x: &Rational) -> Self {
        Poly::constant(x.clone())
    }
    fn scale(&self, x: &Rational) -> Self {
        if x.is_zero() {
            return Poly::default();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * x)).collect() }
    }
}
