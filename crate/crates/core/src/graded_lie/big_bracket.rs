//! Functions on `T*[2]W[1]` for `W` in degree 0, with the big bracket.
//!
//! Generators: coordinates `x_c` (index `c`) and momenta `ξ_c` (index `n + c`), all odd of
//! degree 1. The bracket has degree -2 with `{x_c, ξ_c} = {ξ_c, x_c} = 1`, so the shifted
//! algebra `C[2]` is a graded Lie algebra.

use super::odd::{self, Mask};
use super::GradedLie;
use crate::error::{Error, Result};
use crate::graded_core::{q, LinComb, Rational};

/// A monomial in the `2n` generators, coordinates first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BbKey(pub Mask);

pub type BigBracketElement<S = Rational> = LinComb<BbKey, S>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigBracket {
    n: usize,
    /// Restricts the spanning basis to monomials with at least this many coordinates and momenta.
    min_each: usize,
}

impl BigBracket {
    pub fn new(n: usize) -> Result<Self> {
        if n > 16 {
            return Err(Error::SizeMismatch("at most 16 base coordinates are supported".into()));
        }
        Ok(BigBracket { n, min_each: 0 })
    }

    /// The subalgebra spanned by monomials with at least one coordinate and one momentum.
    pub fn positive_bidegree(n: usize) -> Result<Self> {
        Ok(BigBracket { min_each: 1, ..Self::new(n)? })
    }

    pub fn n_coords(&self) -> usize {
        self.n
    }

    pub fn x(&self, c: usize) -> usize {
        c
    }

    pub fn xi(&self, c: usize) -> usize {
        self.n + c
    }

    /// Number of coordinates and momenta in a key.
    pub fn bidegree(&self, k: &BbKey) -> (usize, usize) {
        let lo = k.0 & ((1u64 << self.n) - 1);
        (lo.count_ones() as usize, (k.0 >> self.n).count_ones() as usize)
    }

    /// The monomial `g_0 g_1 ... g_k` of generator indices, with its sign folded in.
    pub fn monomial(&self, gens: &[usize], c: Rational) -> BigBracketElement {
        let mut sign = 1;
        let mut m: Mask = 0;
        for &g in gens {
            match odd::mul(m, odd::bit(g)) {
                Some((s, m2)) => {
                    sign *= s;
                    m = m2;
                }
                None => return BigBracketElement::zero(),
            }
        }
        BigBracketElement::term(BbKey(m), c * q(sign as i64))
    }

    pub fn product(&self, a: &BigBracketElement, b: &BigBracketElement) -> BigBracketElement {
        let mut out = BigBracketElement::zero();
        for (ka, ca) in a.iter() {
            for (kb, cb) in b.iter() {
                if let Some((s, m)) = odd::mul(ka.0, kb.0) {
                    out.add_term(BbKey(m), ca * cb * q(s as i64));
                }
            }
        }
        out
    }
}

impl GradedLie for BigBracket {
    type Key = BbKey;

    fn degree(&self, key: &BbKey) -> i32 {
        odd::count(key.0) - 2
    }

    fn bracket_keys(&self, f: &BbKey, g: &BbKey) -> Result<LinComb<BbKey>> {
        // {f, g} = Σ_c (f ←∂_{x_c})(∂_{ξ_c}→ g) + (f ←∂_{ξ_c})(∂_{x_c}→ g)
        let mut out = LinComb::zero();
        for c in 0..self.n {
            for (p, r) in [(self.x(c), self.xi(c)), (self.xi(c), self.x(c))] {
                let Some((s1, f1)) = odd::right_deriv(p, f.0) else { continue };
                let Some((s2, g1)) = odd::left_deriv(r, g.0) else { continue };
                if let Some((s3, m)) = odd::mul(f1, g1) {
                    out.add_term(BbKey(m), q((s1 * s2 * s3) as i64));
                }
            }
        }
        Ok(out)
    }

    fn basis(&self, degree: i32) -> Vec<BbKey> {
        let total = degree + 2;
        if total < 0 || total > 2 * self.n as i32 {
            return vec![];
        }
        odd::masks_with(2 * self.n, total as usize)
            .into_iter()
            .map(BbKey)
            .filter(|k| {
                let (a, b) = self.bidegree(k);
                a >= self.min_each && b >= self.min_each
            })
            .collect()
    }

    fn degree_range(&self) -> (i32, i32) {
        (-2, 2 * self.n as i32 - 2)
    }
}
