//! V-data `(L, a, P, Δ)` and everything built from them: derived brackets on `a`, the
//! algebra on `L[1] ⊕ a`, twisting by Maurer-Cartan elements, filtrations, gauge fields
//! and a Newton solver for Maurer-Cartan equations.

pub mod big;
pub mod derived;
pub mod linf;
pub mod newton;
pub mod theorem;

use crate::error::{Error, Result};
use crate::graded_core::{factorial, Coeff, LinComb, Rational};
use crate::graded_lie::{bracket, full_basis, split_by_degree, GradedLie};
use std::sync::Arc;

pub use big::{BigAlgebra, BigElem};
pub use derived::DerivedAlgebra;
pub use linf::{gauge_field, linf_relation_residual, mc_residual, mc_residual_with_cutoff, DirectLInf, LInfinity};
pub use newton::{mc_system, solve_mc_newton, solve_newton, NewtonConfig, NewtonOutcome, PolySystem, Verdict};
pub use theorem::{gauge_field_kernel, thm_machine_check, MachineCheck};

pub type KeyPred<K> = Arc<dyn Fn(&K) -> bool + Send + Sync>;

/// A weight function on basis keys, with an upper bound over the whole window.
#[derive(Clone)]
pub struct Weight<K> {
    pub f: Arc<dyn Fn(&K) -> i32 + Send + Sync>,
    pub max: i32,
}

impl<K> Weight<K> {
    pub fn new(max: i32, f: impl Fn(&K) -> i32 + Send + Sync + 'static) -> Self {
        Weight { f: Arc::new(f), max }
    }

    pub fn of(&self, k: &K) -> i32 {
        (self.f)(k)
    }

    pub fn min_of<S: Coeff>(&self, x: &LinComb<K, S>) -> Option<i32>
    where
        K: Ord + Clone + std::fmt::Debug,
    {
        x.keys().map(|k| self.of(k)).min()
    }
}

/// V-data with a coordinate projection `P` (keep the keys of `a`), optionally twisted to
/// `P_Φ = P ∘ exp([·, Φ])`.
pub struct VData<G: GradedLie> {
    lie: Arc<G>,
    in_a: KeyPred<G::Key>,
    twist: Option<LinComb<G::Key>>,
    delta: LinComb<G::Key>,
    weight: Option<Weight<G::Key>>,
}

impl<G: GradedLie> Clone for VData<G> {
    fn clone(&self) -> Self {
        VData {
            lie: self.lie.clone(),
            in_a: self.in_a.clone(),
            twist: self.twist.clone(),
            delta: self.delta.clone(),
            weight: self.weight.clone(),
        }
    }
}

/// Outcome of [`VData::exp_ad`]: the value and the number of non-zero series terms.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesValue<K: Ord, S> {
    pub value: LinComb<K, S>,
    pub terms: usize,
    pub bound: usize,
}

impl<G: GradedLie> VData<G> {
    pub fn new(lie: Arc<G>, in_a: impl Fn(&G::Key) -> bool + Send + Sync + 'static, delta: LinComb<G::Key>) -> Self {
        VData { lie, in_a: Arc::new(in_a), twist: None, delta, weight: None }
    }

    pub fn with_weight(mut self, w: Weight<G::Key>) -> Self {
        self.weight = Some(w);
        self
    }

    /// Same `L`, `a`, `P` and weight with a different `Δ`.
    pub fn with_delta(&self, delta: LinComb<G::Key>) -> Self {
        VData { delta, ..self.clone() }
    }

    pub fn lie(&self) -> &G {
        &self.lie
    }

    pub fn lie_arc(&self) -> Arc<G> {
        self.lie.clone()
    }

    pub fn delta(&self) -> &LinComb<G::Key> {
        &self.delta
    }

    pub fn weight(&self) -> Option<&Weight<G::Key>> {
        self.weight.as_ref()
    }

    pub fn twist_element(&self) -> Option<&LinComb<G::Key>> {
        self.twist.as_ref()
    }

    pub fn in_abelian(&self, k: &G::Key) -> bool {
        (self.in_a)(k)
    }

    pub fn is_in_abelian<S: Coeff>(&self, x: &LinComb<G::Key, S>) -> bool {
        x.keys().all(|k| self.in_abelian(k))
    }

    /// Basis of `a` in one degree.
    pub fn abelian_basis(&self, degree: i32) -> Vec<G::Key> {
        self.lie.basis(degree).into_iter().filter(|k| self.in_abelian(k)).collect()
    }

    pub fn untwisted_project<S: Coeff>(&self, x: &LinComb<G::Key, S>) -> LinComb<G::Key, S> {
        x.filter(|k| (self.in_a)(k))
    }

    /// `exp([·, Φ]) x`, summed until the terms vanish. The number of terms is certified by
    /// the weight (terms above the maximal weight vanish) or, without a weight, by the
    /// dimension of the degree pieces involved (a nilpotent operator on a space of that
    /// dimension has vanishing power).
    pub fn exp_ad<S: Coeff>(&self, x: &LinComb<G::Key, S>, phi: &LinComb<G::Key, S>) -> Result<SeriesValue<G::Key, S>> {
        let bound = self.nilpotency_bound(x, phi);
        let mut value = x.clone();
        let mut term = x.clone();
        let mut k = 0usize;
        loop {
            if term.is_zero() {
                break;
            }
            k += 1;
            if k > bound {
                return Err(Error::SeriesNotTerminating { bound });
            }
            term = bracket(self.lie.as_ref(), &term, phi)?;
            let scaled = term.scale_q(&(Rational::from_integer(1.into()) / factorial(k)));
            value = value.add(&scaled);
        }
        Ok(SeriesValue { value, terms: k, bound })
    }

    /// An upper bound on the number of non-zero terms of `ad_Φ^k x`.
    fn nilpotency_bound<S: Coeff>(&self, x: &LinComb<G::Key, S>, phi: &LinComb<G::Key, S>) -> usize {
        if let Some(w) = &self.weight {
            let phi_min = w.min_of(phi).unwrap_or(1);
            if phi_min >= 1 {
                if let Some(xmin) = w.min_of(x) {
                    return (w.max - xmin + 1).max(0) as usize;
                }
                return 1;
            }
        }
        let degs = split_by_degree(self.lie.as_ref(), x);
        degs.keys().map(|d| self.lie.basis(*d).len()).max().unwrap_or(0)
    }

    /// `P` (or `P_Φ` when twisted).
    pub fn project<S: Coeff>(&self, x: &LinComb<G::Key, S>) -> Result<LinComb<G::Key, S>> {
        match &self.twist {
            None => Ok(self.untwisted_project(x)),
            Some(phi) => {
                let phi_s: LinComb<G::Key, S> = phi.lift();
                let e = self.exp_ad(x, &phi_s)?;
                Ok(self.untwisted_project(&e.value))
            }
        }
    }

    /// `PΔ`; zero exactly when the V-data is flat.
    pub fn curvature(&self) -> Result<LinComb<G::Key>> {
        self.project(&self.delta)
    }

    pub fn is_flat(&self) -> Result<bool> {
        Ok(self.curvature()?.is_zero())
    }

    /// Twists `P` by a degree-0 Maurer-Cartan element `Φ ∈ a`.
    pub fn twist(&self, phi: &LinComb<G::Key>) -> Result<VData<G>> {
        if !self.is_in_abelian(phi) {
            return Err(Error::NotInAbelian("twist element".into()));
        }
        if phi.keys().any(|k| self.lie.degree(k) != 0) {
            return Err(Error::Degree("twist element must have degree 0".into()));
        }
        let residual = mc_residual(&DerivedAlgebra::new(self), phi)?;
        if !residual.is_zero() {
            return Err(Error::NotMaurerCartan);
        }
        let total = match &self.twist {
            None => phi.clone(),
            Some(p) => p.add(phi),
        };
        Ok(VData { twist: Some(total), ..self.clone() })
    }

    /// Spanning set of `ker P` inside the window.
    pub fn kernel_spanning_set(&self) -> Result<Vec<LinComb<G::Key>>> {
        let base: Vec<LinComb<G::Key>> =
            full_basis(self.lie.as_ref()).into_iter().filter(|k| !self.in_abelian(k)).map(LinComb::single).collect();
        match &self.twist {
            None => Ok(base),
            Some(phi) => {
                // ker P_Φ = exp(-[·,Φ]) ker P
                let neg = phi.neg();
                base.iter().map(|x| self.exp_ad(x, &neg).map(|s| s.value)).collect()
            }
        }
    }
}

/// Result of [`validate_vdata`], with a witness for each failed axiom.
#[derive(Clone, Debug)]
pub struct VDataReport<K: Ord> {
    pub idempotent_failure: Option<K>,
    pub abelian_failure: Option<(K, K)>,
    pub kernel_failure: Option<(LinComb<K>, LinComb<K>)>,
    pub delta_square_zero: bool,
    pub curvature: LinComb<K>,
}

impl<K: Ord + Clone + std::fmt::Debug> VDataReport<K> {
    pub fn is_valid(&self) -> bool {
        self.idempotent_failure.is_none()
            && self.abelian_failure.is_none()
            && self.kernel_failure.is_none()
            && self.delta_square_zero
    }

    pub fn is_flat(&self) -> bool {
        self.curvature.is_zero()
    }
}

/// Checks the V-data axioms on spanning sets of the window.
pub fn validate_vdata<G: GradedLie>(vd: &VData<G>) -> Result<VDataReport<G::Key>> {
    let lie = vd.lie();
    let basis = full_basis(lie);
    let mut idempotent_failure = None;
    for k in &basis {
        let x: LinComb<G::Key> = LinComb::single(k.clone());
        let p = vd.project(&x)?;
        if vd.project(&p)? != p || !vd.is_in_abelian(&p) {
            idempotent_failure = Some(k.clone());
            break;
        }
    }
    let a_keys: Vec<G::Key> = basis.iter().filter(|k| vd.in_abelian(k)).cloned().collect();
    let mut abelian_failure = None;
    'outer: for (i, x) in a_keys.iter().enumerate() {
        for y in &a_keys[i..] {
            if !lie.bracket_keys(x, y)?.is_zero() {
                abelian_failure = Some((x.clone(), y.clone()));
                break 'outer;
            }
        }
    }
    let kernel = vd.kernel_spanning_set()?;
    let mut kernel_failure = None;
    'outer2: for (i, x) in kernel.iter().enumerate() {
        for y in &kernel[i..] {
            let b = bracket(lie, x, y)?;
            if !vd.project(&b)?.is_zero() {
                kernel_failure = Some((x.clone(), y.clone()));
                break 'outer2;
            }
        }
    }
    let delta = vd.delta();
    let delta_square_zero = bracket(lie, delta, delta)?.is_zero();
    let curvature = vd.curvature()?;
    Ok(VDataReport {
        idempotent_failure,
        abelian_failure,
        kernel_failure,
        delta_square_zero,
        curvature,
    })
}

/// Result of [`check_filtration`]: the first violation of each condition.
#[derive(Clone, Debug)]
pub struct FiltrationReport<K> {
    /// `wt([x, y]) >= wt(x) + wt(y)` fails on this pair.
    pub bracket_failure: Option<(K, K)>,
    /// A degree-0 element of `a` with weight below 1.
    pub abelian_zero_failure: Option<K>,
    /// `P` lowers the weight of this key.
    pub projection_failure: Option<K>,
}

impl<K> FiltrationReport<K> {
    pub fn passes(&self) -> bool {
        self.bracket_failure.is_none() && self.abelian_zero_failure.is_none() && self.projection_failure.is_none()
    }
}

/// Checks that the weight defines a filtration compatible with the V-data. Finite windows
/// make the filtration automatically complete and Hausdorff.
pub fn check_filtration<G: GradedLie>(vd: &VData<G>) -> Result<FiltrationReport<G::Key>> {
    let w = vd.weight().ok_or_else(|| Error::InvalidVData("no weight function attached".into()))?;
    let lie = vd.lie();
    let basis = full_basis(lie);
    let mut bracket_failure = None;
    'outer: for x in &basis {
        for y in &basis {
            let b = lie.bracket_keys(x, y)?;
            if b.keys().any(|z| w.of(z) < w.of(x) + w.of(y)) {
                bracket_failure = Some((x.clone(), y.clone()));
                break 'outer;
            }
        }
    }
    if basis.iter().any(|k| w.of(k) > w.max) {
        return Err(Error::InvalidVData("weight exceeds its declared maximum".into()));
    }
    let abelian_zero_failure = vd.abelian_basis(0).into_iter().find(|k| w.of(k) < 1);
    let mut projection_failure = None;
    for k in &basis {
        let p = vd.project(&LinComb::<G::Key>::single(k.clone()))?;
        if p.keys().any(|z| w.of(z) < w.of(k)) {
            projection_failure = Some(k.clone());
            break;
        }
    }
    Ok(FiltrationReport { bracket_failure, abelian_zero_failure, projection_failure })
}
