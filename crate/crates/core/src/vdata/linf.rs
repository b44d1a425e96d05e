//! The interface for (possibly curved) L∞[1] algebras, with the relation residual,
//! the Maurer-Cartan residual and gauge fields computed generically from brackets.

use crate::error::{Error, Result};
use crate::graded_core::{factorial, koszul_sign, q, unshuffles, Coeff, GradedSpace, LinComb, MultilinearMap, Rational};
use std::fmt::Debug;

/// An L∞[1] algebra: graded-symmetric brackets `m_n` of degree 1 (with `m_0` the curvature).
pub trait LInfinity<S: Coeff> {
    type Elem: Clone + Debug + PartialEq;
    type Coord: Ord + Clone + Debug;

    fn zero(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn scale(&self, a: &Self::Elem, c: &S) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Homogeneous components with their degrees.
    fn components(&self, a: &Self::Elem) -> Vec<(i32, Self::Elem)>;
    /// Flat list of coordinates in a fixed basis.
    fn coordinates(&self, a: &Self::Elem) -> Vec<(Self::Coord, S)>;
    fn curvature(&self) -> Result<Self::Elem>;
    fn bracket(&self, args: &[Self::Elem]) -> Result<Self::Elem>;
    /// `K` such that `m_{r+k}(fixed, phi, ..., phi)` vanishes for `k > K`, where `r = fixed.len()`.
    fn series_bound(&self, fixed: &[Self::Elem], phi: &Self::Elem) -> Result<usize>;
    /// Largest relation arity whose brackets are all known, if limited.
    fn relation_window(&self) -> Option<usize> {
        None
    }
}

pub fn degree_of<S: Coeff, A: LInfinity<S>>(alg: &A, x: &A::Elem) -> Result<i32> {
    let comps = alg.components(x);
    match comps.as_slice() {
        [(d, _)] => Ok(*d),
        [] => Ok(0),
        _ => Err(Error::Degree("input is not homogeneous".into())),
    }
}

/// `Σ_{i+j=n+1} Σ_{σ ∈ Sh(i,n-i)} ε(σ) m_j(m_i(v_σ(1..i)), v_σ(i+1..n))` on homogeneous inputs,
/// including the `m_0` terms.
pub fn linf_relation_residual<S: Coeff, A: LInfinity<S>>(alg: &A, inputs: &[A::Elem]) -> Result<A::Elem> {
    let n = inputs.len();
    let m0 = alg.curvature()?;
    if let Some(w) = alg.relation_window() {
        let needed = if alg.is_zero(&m0) { n } else { n + 1 };
        if needed > w {
            return Err(Error::WindowExceeded { arity: needed, window: w });
        }
    }
    let degs: Vec<i32> = inputs.iter().map(|x| degree_of(alg, x)).collect::<Result<_>>()?;
    let mut total = alg.zero();
    for i in 0..=n {
        for s in unshuffles(i, n - i) {
            let sign = koszul_sign(&s, &degs);
            let permuted = s.permute(inputs);
            let inner = if i == 0 { m0.clone() } else { alg.bracket(&permuted[..i])? };
            if alg.is_zero(&inner) {
                continue;
            }
            let mut args = vec![inner];
            args.extend_from_slice(&permuted[i..]);
            let outer = alg.bracket(&args)?;
            total = alg.add(&total, &alg.scale(&outer, &S::from_rational(&q(sign as i64))));
        }
    }
    Ok(total)
}

fn inv_factorial(n: usize) -> Rational {
    q(1) / factorial(n)
}

/// `m_0 + Σ_{n≥1} m_n(Φ, ..., Φ)/n!`, summed up to the certified series bound.
pub fn mc_residual<S: Coeff, A: LInfinity<S>>(alg: &A, phi: &A::Elem) -> Result<A::Elem> {
    let bound = alg.series_bound(&[], phi)?;
    mc_partial_sum(alg, phi, bound)
}

/// As [`mc_residual`] with an explicit arity cutoff, which must reach the certified bound.
pub fn mc_residual_with_cutoff<S: Coeff, A: LInfinity<S>>(alg: &A, phi: &A::Elem, cutoff: usize) -> Result<A::Elem> {
    let bound = alg.series_bound(&[], phi)?;
    if cutoff < bound {
        return Err(Error::UnverifiableTruncation(format!(
            "cutoff {cutoff} is below the arity {bound} up to which terms may be non-zero"
        )));
    }
    mc_partial_sum(alg, phi, bound)
}

fn mc_partial_sum<S: Coeff, A: LInfinity<S>>(alg: &A, phi: &A::Elem, bound: usize) -> Result<A::Elem> {
    let mut total = alg.curvature()?;
    for n in 1..=bound {
        let args = vec![phi.clone(); n];
        let term = alg.bracket(&args)?;
        total = alg.add(&total, &alg.scale(&term, &S::from_rational(&inv_factorial(n))));
    }
    Ok(total)
}

/// The gauge vector field `Y^z|_m = m_1(z) + Σ_{n≥1} m_{n+1}(z, m, ..., m)/n!`.
pub fn gauge_field<S: Coeff, A: LInfinity<S>>(alg: &A, z: &A::Elem, m: &A::Elem) -> Result<A::Elem> {
    let bound = alg.series_bound(std::slice::from_ref(z), m)?;
    let mut total = alg.bracket(std::slice::from_ref(z))?;
    for n in 1..=bound {
        let mut args = vec![z.clone()];
        args.extend(std::iter::repeat(m.clone()).take(n));
        let term = alg.bracket(&args)?;
        total = alg.add(&total, &alg.scale(&term, &S::from_rational(&inv_factorial(n))));
    }
    Ok(total)
}

/// An L∞[1] algebra on a graded space given by finitely many bracket tables.
#[derive(Clone, Debug)]
pub struct DirectLInf {
    space: GradedSpace,
    brackets: Vec<MultilinearMap>,
    window: Option<usize>,
}

impl DirectLInf {
    /// `brackets` are graded-symmetric maps of degree 1 on `space`, at most one per arity.
    pub fn new(space: GradedSpace, brackets: Vec<MultilinearMap>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        let mut tables = Vec::new();
        for b in brackets {
            if b.source() != &space || b.target() != &space {
                return Err(Error::BaseMismatch("bracket table on a different space".into()));
            }
            if b.degree() != 1 && !b.is_zero() {
                return Err(Error::Degree(format!("bracket of arity {} has degree {}", b.arity(), b.degree())));
            }
            if !seen.insert(b.arity()) {
                return Err(Error::Input(format!("two tables of arity {}", b.arity())));
            }
            tables.push(b.to_symmetric()?);
        }
        Ok(DirectLInf { space, brackets: tables, window: None })
    }

    /// Declares that brackets are only known up to the given arity.
    pub fn with_window(mut self, window: usize) -> Self {
        self.window = Some(window);
        self
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn table(&self, arity: usize) -> Option<&MultilinearMap> {
        self.brackets.iter().find(|b| b.arity() == arity)
    }

    pub fn tables(&self) -> &[MultilinearMap] {
        &self.brackets
    }

    pub fn max_arity(&self) -> usize {
        self.brackets.iter().filter(|b| !b.is_zero()).map(|b| b.arity()).max().unwrap_or(0)
    }

    pub fn basis_vector<S: Coeff>(&self, i: usize) -> LinComb<usize, S> {
        LinComb::single(i)
    }
}

impl<S: Coeff> LInfinity<S> for DirectLInf {
    type Elem = LinComb<usize, S>;
    type Coord = usize;

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
        let mut by: std::collections::BTreeMap<i32, Self::Elem> = Default::default();
        for (k, c) in a.iter() {
            by.entry(self.space.degree(*k)).or_default().add_term(*k, c.clone());
        }
        by.into_iter().collect()
    }
    fn coordinates(&self, a: &Self::Elem) -> Vec<(usize, S)> {
        a.iter().map(|(k, c)| (*k, c.clone())).collect()
    }
    fn curvature(&self) -> Result<Self::Elem> {
        Ok(self.table(0).map(|t| t.eval_basis(&[]).lift()).unwrap_or_default())
    }
    fn bracket(&self, args: &[Self::Elem]) -> Result<Self::Elem> {
        let Some(t) = self.table(args.len()) else { return Ok(LinComb::zero()) };
        let mut out = LinComb::zero();
        let mut idx = Vec::with_capacity(args.len());
        fn rec<S: Coeff>(t: &MultilinearMap, args: &[LinComb<usize, S>], idx: &mut Vec<usize>, c: S, out: &mut LinComb<usize, S>) {
            if idx.len() == args.len() {
                let v = t.eval_basis(idx);
                out.add_scaled_q(&v, &c);
                return;
            }
            for (k, v) in args[idx.len()].iter() {
                idx.push(*k);
                rec(t, args, idx, c.mul(v), out);
                idx.pop();
            }
        }
        rec(t, args, &mut idx, S::one(), &mut out);
        Ok(out)
    }
    fn series_bound(&self, fixed: &[Self::Elem], _phi: &Self::Elem) -> Result<usize> {
        Ok(self.max_arity().saturating_sub(fixed.len()))
    }
    fn relation_window(&self) -> Option<usize> {
        self.window
    }
}
