//! Simultaneous deformations: `Δ + Δ̃` with `Φ + Φ̃` on one side, the Maurer-Cartan
//! equation of `(L[1] ⊕ a)` twisted by `Φ` on the other.

use super::big::{BigAlgebra, BigElem};
use super::derived::DerivedAlgebra;
use super::linf::mc_residual;
use super::VData;
use crate::error::{Error, Result};
use crate::graded_core::{factorial, q, Coeff, LinComb};
use crate::graded_lie::{bracket, nested_bracket, GradedLie};

#[derive(Clone, Debug)]
pub struct MachineCheck<K: Ord> {
    /// `[Δ + Δ̃, Δ + Δ̃]`.
    pub delta_square: LinComb<K>,
    /// Maurer-Cartan residual of `Φ + Φ̃` for the derived brackets of `Δ + Δ̃`.
    pub lhs_residual: LinComb<K>,
    /// Maurer-Cartan residual of `(Δ̃[1], Φ̃)` in the twisted algebra on `L[1] ⊕ a`.
    pub rhs_residual: BigElem<K, crate::graded_core::Rational>,
}

impl<K: Ord + Clone + std::fmt::Debug> MachineCheck<K> {
    pub fn lhs(&self) -> bool {
        self.delta_square.is_zero() && self.lhs_residual.is_zero()
    }

    pub fn rhs(&self) -> bool {
        self.rhs_residual.l.is_zero() && self.rhs_residual.a.is_zero()
    }

    pub fn agrees(&self) -> bool {
        self.lhs() == self.rhs()
    }
}

/// Evaluates both sides independently. `phi` must be Maurer-Cartan for `vd`.
pub fn thm_machine_check<G: GradedLie>(
    vd: &VData<G>,
    phi: &LinComb<G::Key>,
    delta_t: &LinComb<G::Key>,
    phi_t: &LinComb<G::Key>,
) -> Result<MachineCheck<G::Key>> {
    let lie = vd.lie();
    if delta_t.keys().any(|k| lie.degree(k) != 1) {
        return Err(Error::Degree("Δ̃ must have degree 1".into()));
    }
    if phi_t.keys().any(|k| lie.degree(k) != 0) || !vd.is_in_abelian(phi_t) {
        return Err(Error::Degree("Φ̃ must be a degree-0 element of a".into()));
    }
    let total = vd.delta().add(delta_t);
    let delta_square = bracket(lie, &total, &total)?;
    let lhs_vd = vd.with_delta(total);
    let lhs_residual = mc_residual(&DerivedAlgebra::new(&lhs_vd), &phi.add(phi_t))?;

    let twisted = vd.twist(phi)?;
    let big = BigAlgebra::new(&twisted)?;
    let rhs_residual = mc_residual(&big, &BigElem::new(delta_t.clone(), phi_t.clone()))?;
    Ok(MachineCheck { delta_square, lhs_residual, rhs_residual })
}

/// Gauge field on the sub-algebra `ker P[1] ⊕ a` of the `Δ = 0` algebra, written out as
/// `[z_L, m_L][1] + Σ P[[z_L, m_a], ...]/n! + Σ P[[[m_L, z_a], m_a], ...]/(n-1)!`.
pub fn gauge_field_kernel<G: GradedLie, S: Coeff>(
    vd: &VData<G>,
    z: &BigElem<G::Key, S>,
    m: &BigElem<G::Key, S>,
) -> Result<BigElem<G::Key, S>> {
    if !vd.delta().is_zero() {
        return Err(Error::InvalidVData("the kernel gauge formula needs Δ = 0".into()));
    }
    let lie = vd.lie();
    let l_part = bracket(lie, &z.l, &m.l)?;
    let cap = crate::graded_lie::full_basis(lie).len() + 1;
    let mut a_part = LinComb::zero();
    // Adds Σ_k P[...[head, m_a], ..., m_a] / (k + offset)! over k appended copies.
    let mut push_chain = |head: LinComb<G::Key, S>, offset: usize| -> Result<()> {
        let mut t = head;
        let mut k = 0usize;
        while !t.is_zero() {
            if k > cap {
                return Err(Error::SeriesNotTerminating { bound: cap });
            }
            a_part = a_part.add(&vd.project(&t)?.scale_q(&(q(1) / factorial(k + offset))));
            t = bracket(lie, &t, &m.a)?;
            k += 1;
        }
        Ok(())
    };
    push_chain(bracket(lie, &z.l, &m.a)?, 1)?;
    push_chain(nested_bracket(lie, &m.l, std::slice::from_ref(&z.a))?, 0)?;
    Ok(BigElem::new(l_part, a_part))
}
