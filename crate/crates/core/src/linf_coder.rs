//! L∞[1] structures as coderivations of symmetric coalgebras: the embeddings `α` and `J`,
//! recovery of the brackets as derived brackets, L∞[1] morphisms as Maurer-Cartan elements,
//! and the L∞[1] structure obtained by symmetrizing an A∞[1] structure.

use crate::error::{Error, Result};
use crate::graded_core::{
    block_to_front_sign, factorial, koszul_sign, q, subsets, GradedSpace, LinComb, MultilinearMap, Permutation,
    Rational, Vector,
};
use crate::graded_lie;
use crate::graded_lie::coder::Word;
use crate::graded_lie::{CoderAlgebra, CoderKey, Coderivation, Flavor, Overflow};
use crate::vdata::{mc_residual, BigAlgebra, BigElem, DerivedAlgebra, DirectLInf, LInfinity, VData, Weight};
use std::sync::Arc;

pub type HomElem = LinComb<CoderKey>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoalgebraFlavor {
    /// `SW` with unit `1`.
    Symmetric,
    /// `S̄W = ⊕_{k≥1} S^k W`.
    ReducedSymmetric,
    Tensor,
    ReducedTensor,
}

impl CoalgebraFlavor {
    fn split(self) -> (Flavor, usize) {
        match self {
            CoalgebraFlavor::Symmetric => (Flavor::Symmetric, 0),
            CoalgebraFlavor::ReducedSymmetric => (Flavor::Symmetric, 1),
            CoalgebraFlavor::Tensor => (Flavor::Tensor, 0),
            CoalgebraFlavor::ReducedTensor => (Flavor::Tensor, 1),
        }
    }
}

/// Words of length at most `cutoff` with the (reduced) coproduct.
#[derive(Clone, Debug)]
pub struct TruncatedCoalgebra {
    alg: CoderAlgebra,
}

type Triple = (Word, Word, Word);

impl TruncatedCoalgebra {
    pub fn new(space: GradedSpace, flavor: CoalgebraFlavor, cutoff: usize) -> Result<Self> {
        let (f, min) = flavor.split();
        Ok(TruncatedCoalgebra { alg: CoderAlgebra::new(f, space, min, cutoff, Overflow::Quotient)? })
    }

    /// The Lie algebra of coderivations of this coalgebra.
    pub fn coderivations(&self) -> &CoderAlgebra {
        &self.alg
    }

    pub fn words(&self, len: usize) -> Vec<Word> {
        self.alg.words(len)
    }

    pub fn coproduct(&self, w: &[u16]) -> LinComb<(Word, Word)> {
        Coderivation::coproduct(&self.alg, w)
    }

    /// A word on which `(Δ ⊗ 1)Δ ≠ (1 ⊗ Δ)Δ`.
    pub fn coassociativity_witness(&self) -> Option<Word> {
        let lo = self.alg.min_arity();
        for n in lo..=self.alg.cutoff() {
            for w in self.words(n) {
                let mut left: LinComb<Triple> = LinComb::zero();
                let mut right: LinComb<Triple> = LinComb::zero();
                for ((a, b), c) in self.coproduct(&w).iter() {
                    for ((a1, a2), c1) in self.coproduct(a).iter() {
                        left.add_term((a1.clone(), a2.clone(), b.clone()), c * c1);
                    }
                    for ((b1, b2), c2) in self.coproduct(b).iter() {
                        right.add_term((a.clone(), b1.clone(), b2.clone()), c * c2);
                    }
                }
                if left != right {
                    return Some(w);
                }
            }
        }
        None
    }
}

/// Coderivations of the unital coalgebra `SW` (or `TW`), truncated at `cutoff`.
pub fn unital_coderivations(space: GradedSpace, flavor: Flavor, cutoff: usize) -> Result<CoderAlgebra> {
    CoderAlgebra::new(flavor, space, 0, cutoff, Overflow::Quotient)
}

fn vector_degree(space: &GradedSpace, w: &Vector) -> Result<i32> {
    let mut degs: Vec<i32> = w.keys().map(|&i| space.degree(i)).collect();
    degs.dedup();
    match degs.as_slice() {
        [] => Ok(0),
        [d] => Ok(*d),
        _ => Err(Error::Degree("w is not homogeneous".into())),
    }
}

/// `α_w`: multiplication by `w`, the coderivation whose only Taylor coefficient is `1 ↦ w`.
pub fn alpha(alg: &CoderAlgebra, w: &Vector) -> Result<Coderivation> {
    if alg.min_arity() != 0 {
        return Err(Error::Input("α_w lives on the coalgebra with unit".into()));
    }
    vector_degree(alg.space(), w)?;
    let coeffs = LinComb::from_terms(w.iter().map(|(i, c)| (CoderKey::new(vec![], *i as u16), c.clone())));
    Coderivation::new(alg.clone(), coeffs)
}

/// `J Θ`: the same Taylor coefficients on the coalgebra with unit, vanishing on `1`.
pub fn embed_j(theta: &Coderivation) -> Result<Coderivation> {
    if theta.coeffs().keys().any(|k| k.arity() == 0) {
        return Err(Error::Input("J is defined on coderivations without arity-0 coefficient".into()));
    }
    let a = theta.algebra();
    let target = CoderAlgebra::new(a.flavor(), a.space().clone(), 0, a.cutoff(), a.overflow())?;
    Coderivation::new(target, theta.coeffs().clone())
}

/// `τ(1)`, which always lies in `W`.
pub fn unit_value(tau: &Coderivation) -> Result<Vector> {
    let v = tau.apply_word(&[]);
    if v.keys().any(|w| w.len() != 1) {
        return Err(Error::InvalidVData("τ(1) has components outside W".into()));
    }
    Ok(LinComb::from_terms(v.iter().map(|(w, c)| (w[0] as usize, c.clone()))))
}

/// The reduced symmetric coderivation whose Taylor coefficients are the brackets of `l`.
pub fn theta_from_linf(l: &DirectLInf, cutoff: usize) -> Result<Coderivation> {
    let alg = CoderAlgebra::new(Flavor::Symmetric, l.space().clone(), 1, cutoff, Overflow::Quotient)?;
    let mut maps = Vec::new();
    for t in l.tables() {
        if t.is_zero() {
            continue;
        }
        if t.arity() == 0 {
            return Err(Error::CurvedRejected);
        }
        if t.arity() > cutoff {
            return Err(Error::CutoffOverflow { arity: t.arity(), cutoff });
        }
        maps.push(t.clone());
    }
    Coderivation::from_taylor(alg, &maps)
}

/// Taylor coefficients of a coderivation as an L∞[1] presentation.
pub fn linf_from_theta(theta: &Coderivation) -> Result<DirectLInf> {
    let a = theta.algebra();
    let tables: Vec<MultilinearMap> = (1..=a.cutoff()).map(|n| theta.taylor(n, 1)).collect::<Result<_>>()?;
    DirectLInf::new(a.space().clone(), tables)
}

/// `[Θ, Θ] = 0` on words up to the cutoff.
pub fn squares_to_zero(theta: &Coderivation) -> Result<bool> {
    Ok(graded_lie::bracket(theta.algebra(), theta.coeffs(), theta.coeffs())?.is_zero())
}

fn a_key(i: usize) -> CoderKey {
    CoderKey::new(vec![], i as u16)
}

/// `(Coder(SW), {α_w}, τ ↦ α_{τ(1)}, Δ)` with the weight `1 - arity`.
pub fn unit_vdata(alg: CoderAlgebra, delta: HomElem) -> VData<CoderAlgebra> {
    let weight = Weight::new(1, |k: &CoderKey| 1 - k.arity() as i32);
    VData::new(Arc::new(alg), |k: &CoderKey| k.arity() == 0, delta).with_weight(weight)
}

/// The V-data recovering the L∞[1] structure `l` as derived brackets.
pub fn keyli_vdata(l: &DirectLInf, cutoff: usize) -> Result<VData<CoderAlgebra>> {
    let j = embed_j(&theta_from_linf(l, cutoff)?)?;
    Ok(unit_vdata(j.algebra().clone(), j.coeffs().clone()))
}

fn derived_tables(vd: &VData<CoderAlgebra>, max_arity: usize, degree: i32) -> Result<Vec<MultilinearMap>> {
    let alg = vd.lie();
    let space = alg.space().clone();
    let sym = CoderAlgebra::new(Flavor::Symmetric, space.clone(), 1, max_arity.max(1), Overflow::Quotient)?;
    let d = DerivedAlgebra::new(vd);
    let mut out = Vec::new();
    for n in 1..=max_arity {
        let mut t = MultilinearMap::new(space.clone(), space.clone(), n, degree, true);
        for w in sym.words(n) {
            let args: Vec<HomElem> = w.iter().map(|&i| HomElem::single(a_key(i as usize))).collect();
            let v: HomElem = d.bracket(&args)?;
            let inputs: Vec<usize> = w.iter().map(|&i| i as usize).collect();
            for (k, c) in v.iter() {
                t.add_entry(&inputs, k.output as usize, c.clone())?;
            }
        }
        out.push(t);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct KeyliRecovery {
    pub recovered: DirectLInf,
    /// First input tuple where a recovered bracket differs from the given one.
    pub mismatch: Option<Vec<usize>>,
}

impl KeyliRecovery {
    pub fn matches(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Derived brackets `P[...[JΘ, α_{w_1}], ..., α_{w_n}]` for all arities up to `cutoff`,
/// compared entrywise with the brackets of `l`.
pub fn keyli_recover(l: &DirectLInf, cutoff: usize) -> Result<KeyliRecovery> {
    if l.max_arity() > cutoff {
        return Err(Error::CutoffOverflow { arity: l.max_arity(), cutoff });
    }
    let theta = theta_from_linf(l, cutoff)?;
    if !squares_to_zero(&theta)? {
        return Err(Error::InvalidVData("[Θ, Θ] ≠ 0 within the cutoff".into()));
    }
    let vd = keyli_vdata(l, cutoff)?;
    let tables = derived_tables(&vd, cutoff, 1)?;
    let mut mismatch = None;
    'outer: for t in &tables {
        for inp in t.all_tuples() {
            let given = l.table(t.arity()).map(|g| g.eval_basis(&inp)).unwrap_or_default();
            if t.eval_basis(&inp) != given {
                mismatch = Some(inp);
                break 'outer;
            }
        }
    }
    Ok(KeyliRecovery { recovered: DirectLInf::new(l.space().clone(), tables)?, mismatch })
}

/// Both sides of the pair statement: `Θ̃` homological with `Φ̃` Maurer-Cartan for it, versus
/// `(JΘ̃[1], Φ̃)` Maurer-Cartan in the algebra on `ker P [1] ⊕ W` built from `Δ = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairCheck {
    pub homological: bool,
    pub phi_is_mc: bool,
    pub pair_is_mc: bool,
}

impl PairCheck {
    pub fn agrees(&self) -> bool {
        (self.homological && self.phi_is_mc) == self.pair_is_mc
    }
}

pub fn mcli_pair_check(theta: &Coderivation, phi: &Vector) -> Result<PairCheck> {
    if theta.degrees().iter().any(|&d| d != 1) {
        return Err(Error::Degree("Θ̃ must have degree 1".into()));
    }
    let space = theta.algebra().space().clone();
    if phi.keys().any(|&i| space.degree(i) != 0) {
        return Err(Error::Degree("Φ̃ must have degree 0".into()));
    }
    let homological = squares_to_zero(theta)?;
    let phi_is_mc = homological && {
        let l = linf_from_theta(theta)?;
        mc_residual::<Rational, _>(&l, phi)?.is_zero()
    };
    let j = embed_j(theta)?;
    let vd = unit_vdata(j.algebra().clone(), HomElem::zero());
    let big = BigAlgebra::new(&vd)?;
    let a = HomElem::from_terms(phi.iter().map(|(i, c)| (a_key(*i), c.clone())));
    let r: BigElem<CoderKey, Rational> = mc_residual(&big, &BigElem::new(j.coeffs().clone(), a))?;
    Ok(PairCheck { homological, phi_is_mc, pair_is_mc: r.l.is_zero() && r.a.is_zero() })
}

/// Two L∞[1] algebras on `U` and `V` inside the coderivations of `S̄(U ⊕ V)`, with `a` the
/// maps from `S̄U` to `V`. Letters `0..dim U` are `U`, the rest `V`.
#[derive(Clone)]
pub struct LinfMorphismSetup {
    pub mu: DirectLInf,
    pub nu: DirectLInf,
    alg: Arc<CoderAlgebra>,
    vdata: VData<CoderAlgebra>,
}

fn encode_tables(tables: &[MultilinearMap], in_offset: usize, out_offset: usize) -> Result<HomElem> {
    let mut out = HomElem::zero();
    for t in tables {
        for (inp, v) in t.to_symmetric()?.entries() {
            let w: Vec<u16> = inp.iter().map(|&i| (i + in_offset) as u16).collect();
            for (o, c) in v.iter() {
                out.add_term(CoderKey::new(w.clone(), (o + out_offset) as u16), c.clone());
            }
        }
    }
    Ok(out)
}

impl LinfMorphismSetup {
    pub fn new(mu: &DirectLInf, nu: &DirectLInf, cutoff: usize) -> Result<Self> {
        for l in [mu, nu] {
            if l.max_arity() > cutoff {
                return Err(Error::CutoffOverflow { arity: l.max_arity(), cutoff });
            }
            if l.table(0).is_some_and(|t| !t.is_zero()) {
                return Err(Error::CurvedRejected);
            }
        }
        let du = mu.space().dim();
        let space = mu.space().direct_sum(nu.space());
        let alg = Arc::new(CoderAlgebra::new(Flavor::Symmetric, space, 1, cutoff, Overflow::Quotient)?);
        let delta = encode_tables(mu.tables(), 0, 0)?.add(&encode_tables(nu.tables(), du, du)?);
        let in_a = move |k: &CoderKey| k.inputs.iter().all(|&i| (i as usize) < du) && k.output as usize >= du;
        let weight = Weight::new(cutoff as i32, move |k: &CoderKey| {
            k.inputs.iter().filter(|&&i| (i as usize) < du).count() as i32 + i32::from(k.output as usize >= du) - 1
        });
        let vdata = VData::new(alg.clone(), in_a, delta).with_weight(weight);
        Ok(LinfMorphismSetup { mu: mu.clone(), nu: nu.clone(), alg, vdata })
    }

    pub fn coderivations(&self) -> &CoderAlgebra {
        &self.alg
    }

    pub fn vdata(&self) -> &VData<CoderAlgebra> {
        &self.vdata
    }

    pub fn dim_u(&self) -> usize {
        self.mu.space().dim()
    }

    pub fn cutoff(&self) -> usize {
        self.alg.cutoff()
    }

    /// Components `Φ_n : S^n U → V` of degree 0 as an element of `a`.
    pub fn encode_family(&self, phi: &[MultilinearMap]) -> Result<HomElem> {
        for f in phi {
            if f.source() != self.mu.space() || f.target() != self.nu.space() {
                return Err(Error::BaseMismatch("Φ_n must map S^n U to V".into()));
            }
            if f.degree() != 0 && !f.is_zero() {
                return Err(Error::Degree("Φ_n must have degree 0".into()));
            }
            if f.arity() == 0 || f.arity() > self.cutoff() {
                return Err(Error::CutoffOverflow { arity: f.arity(), cutoff: self.cutoff() });
            }
        }
        encode_tables(phi, 0, self.dim_u())
    }

    /// The Maurer-Cartan residual of the derived brackets at `Φ`.
    pub fn residual_mc(&self, phi: &[MultilinearMap]) -> Result<HomElem> {
        mc_residual(&DerivedAlgebra::new(&self.vdata), &self.encode_family(phi)?)
    }

    /// `Σ_{I⊔J} Φ_{|J|+1}(μ(U_I)·U_J) - Σ_n 1/n! Σ ν_n(Φ(U_{I_1})⋯Φ(U_{I_n}))` on every
    /// normal-form word of `S^s U`, `s ≤ cutoff`, stored with the same keys as `a`.
    pub fn residual_direct(&self, phi: &[MultilinearMap]) -> Result<HomElem> {
        self.encode_family(phi)?;
        let du = self.dim_u();
        let u_alg = CoderAlgebra::new(Flavor::Symmetric, self.mu.space().clone(), 1, self.cutoff(), Overflow::Quotient)?;
        let mut out = HomElem::zero();
        for s in 1..=self.cutoff() {
            for w in u_alg.words(s) {
                let word: Vec<usize> = w.iter().map(|&i| i as usize).collect();
                let mut v = self.lhs_at(phi, &word);
                for n in 1..=s {
                    v = v.sub(&self.rhs_term_at(phi, &word, n).scale(&(q(1) / factorial(n))));
                }
                for (k, c) in v.iter() {
                    out.add_term(CoderKey::new(w.clone(), (du + k) as u16), c.clone());
                }
            }
        }
        Ok(out)
    }

    /// `Σ_{I⊔J=[s]} Φ_{|J|+1}(μ_{|I|}(U_I)·U_J)`.
    pub fn lhs_at(&self, phi: &[MultilinearMap], word: &[usize]) -> Vector {
        let degs: Vec<i32> = word.iter().map(|&i| self.mu.space().degree(i)).collect();
        let mut out = Vector::zero();
        for size in 1..=word.len() {
            let Some(m) = self.mu.table(size) else { continue };
            for t in subsets(word.len(), size) {
                let eps = q(block_to_front_sign(&t, &degs) as i64);
                let sub: Vec<usize> = t.iter().map(|&i| word[i]).collect();
                let rest: Vec<usize> = (0..word.len()).filter(|i| !t.contains(i)).map(|i| word[i]).collect();
                let Some(f) = family_member(phi, rest.len() + 1) else { continue };
                for (j, c) in m.eval_basis(&sub).iter() {
                    let mut inp = vec![*j];
                    inp.extend_from_slice(&rest);
                    out.add_scaled(&f.eval_basis(&inp), &(c * &eps));
                }
            }
        }
        out
    }

    /// `Σ_{I_1⊔…⊔I_n=[s]} ν_n(Φ(U_{I_1})⋯Φ(U_{I_n}))` over ordered partitions into non-empty blocks.
    pub fn rhs_term_at(&self, phi: &[MultilinearMap], word: &[usize], n: usize) -> Vector {
        let Some(nu) = self.nu.table(n) else { return Vector::zero() };
        let degs: Vec<i32> = word.iter().map(|&i| self.mu.space().degree(i)).collect();
        let mut out = Vector::zero();
        for blocks in ordered_partitions(word.len(), n) {
            let images: Vec<usize> = blocks.iter().flatten().copied().collect();
            let eps = koszul_sign(&Permutation::from_images(images).expect("partition"), &degs);
            let mut args = Vec::new();
            for b in &blocks {
                let Some(f) = family_member(phi, b.len()) else { break };
                let inp: Vec<usize> = b.iter().map(|&i| word[i]).collect();
                args.push(f.eval_basis(&inp));
            }
            if args.len() != n {
                continue;
            }
            out.add_scaled(&nu.eval(&args).expect("arity checked"), &q(eps as i64));
        }
        out
    }

    pub fn is_morphism_direct(&self, phi: &[MultilinearMap]) -> Result<bool> {
        Ok(self.residual_direct(phi)?.is_zero())
    }
}

fn family_member(phi: &[MultilinearMap], arity: usize) -> Option<&MultilinearMap> {
    phi.iter().find(|f| f.arity() == arity)
}

/// Ordered partitions of `0..s` into `n` non-empty blocks, each block increasing.
pub fn ordered_partitions(s: usize, n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    if n == 0 {
        if s == 0 {
            out.push(vec![]);
        }
        return out;
    }
    let total = n.pow(s as u32);
    for code in 0..total {
        let mut blocks = vec![Vec::new(); n];
        let mut c = code;
        for i in 0..s {
            blocks[c % n].push(i);
            c /= n;
        }
        if blocks.iter().all(|b| !b.is_empty()) {
            out.push(blocks);
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct Symmetrization {
    /// Brackets from the derived-bracket route with `α_w` inserting `w` in every slot.
    pub linf: DirectLInf,
    /// `Σ_σ ±Θ¹_n(w_{σ(1)} ⊗ ⋯ ⊗ w_{σ(n)})` evaluated directly.
    pub direct: Vec<MultilinearMap>,
}

impl Symmetrization {
    pub fn agrees(&self) -> bool {
        self.direct.iter().all(|d| {
            let t = self.linf.table(d.arity());
            d.all_tuples().iter().all(|inp| t.map(|t| t.eval_basis(inp)).unwrap_or_default() == d.eval_basis(inp))
        })
    }
}

/// The L∞[1] structure of an A∞[1] structure `Θ` on the reduced tensor coalgebra.
pub fn symmetrize_ainf(theta: &Coderivation) -> Result<Symmetrization> {
    let a = theta.algebra();
    if a.flavor() != Flavor::Tensor {
        return Err(Error::Input("expected a tensor coderivation".into()));
    }
    if !squares_to_zero(theta)? {
        return Err(Error::InvalidVData("[Θ, Θ] ≠ 0 within the cutoff".into()));
    }
    let j = embed_j(theta)?;
    let vd = unit_vdata(j.algebra().clone(), j.coeffs().clone());
    let tables = derived_tables(&vd, a.cutoff(), 1)?;
    let space = a.space().clone();
    let mut direct = Vec::new();
    for n in 1..=a.cutoff() {
        let th = theta.taylor(n, 1)?;
        let mut d = MultilinearMap::new(space.clone(), space.clone(), n, 1, false);
        let probe = MultilinearMap::new(space.clone(), space.clone(), n, 1, false);
        for inp in probe.all_tuples() {
            let degs: Vec<i32> = inp.iter().map(|&i| space.degree(i)).collect();
            let mut v = Vector::zero();
            for s in Permutation::all(n) {
                let permuted = s.permute(&inp);
                v.add_scaled(&th.eval_basis(&permuted), &q(koszul_sign(&s, &degs) as i64));
            }
            for (o, c) in v.iter() {
                d.add_entry(&inp, *o, c.clone())?;
            }
        }
        direct.push(d);
    }
    Ok(Symmetrization { linf: DirectLInf::new(space, tables)?, direct })
}

/// Named L∞[1] presentations used for round-trip checks.
pub fn registered_examples() -> Vec<(&'static str, DirectLInf)> {
    let mut out = Vec::new();
    // d(e_0) = e_1 on W = span(e_0 [-1], e_1 [0]).
    let sp = GradedSpace::new(vec![-1, 0]);
    let mut d = MultilinearMap::new(sp.clone(), sp.clone(), 1, 1, true);
    d.add_entry(&[0], 1, q(1)).unwrap();
    out.push(("differential", DirectLInf::new(sp, vec![d]).unwrap()));
    // Two differentials on four generators.
    let sp = GradedSpace::new(vec![-1, 0, -2, -1]);
    let mut d = MultilinearMap::new(sp.clone(), sp.clone(), 1, 1, true);
    d.add_entry(&[0], 1, q(1)).unwrap();
    d.add_entry(&[2], 3, q(-2)).unwrap();
    out.push(("two-differentials", DirectLInf::new(sp, vec![d]).unwrap()));
    // Heisenberg algebra on the shift: m_2(e_0, e_1) = e_2.
    let sp = GradedSpace::concentrated(3, -1);
    let mut m = MultilinearMap::new(sp.clone(), sp.clone(), 2, 1, true);
    m.add_entry(&[0, 1], 2, q(1)).unwrap();
    out.push(("heisenberg", DirectLInf::new(sp, vec![m]).unwrap()));
    // A DGLA: [x, y] = z on the shift, with a central c and d(c) = z.
    let sp = GradedSpace::new(vec![-1, -1, -1, -2]);
    let mut d = MultilinearMap::new(sp.clone(), sp.clone(), 1, 1, true);
    d.add_entry(&[3], 2, q(1)).unwrap();
    let mut m = MultilinearMap::new(sp.clone(), sp.clone(), 2, 1, true);
    m.add_entry(&[0, 1], 2, q(1)).unwrap();
    out.push(("dgla", DirectLInf::new(sp, vec![d, m]).unwrap()));
    // m_3(a, b, c) = z with a, b, c even and z odd.
    let sp = GradedSpace::new(vec![0, 0, 0, 1]);
    let mut m = MultilinearMap::new(sp.clone(), sp.clone(), 3, 1, true);
    m.add_entry(&[0, 1, 2], 3, q(1)).unwrap();
    m.add_entry(&[0, 0, 1], 3, q(2)).unwrap();
    out.push(("ternary-nilpotent", DirectLInf::new(sp, vec![m]).unwrap()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded_lie::{bracket, full_basis};
    use crate::vdata::{check_filtration, linf_relation_residual, validate_vdata};

    fn vec_of(entries: &[(usize, i64)]) -> Vector {
        LinComb::from_terms(entries.iter().map(|&(i, c)| (i, q(c))))
    }

    #[test]
    fn coproducts_are_coassociative() {
        let sp = GradedSpace::new(vec![-1, 0]);
        for flavor in [
            CoalgebraFlavor::Symmetric,
            CoalgebraFlavor::ReducedSymmetric,
            CoalgebraFlavor::Tensor,
            CoalgebraFlavor::ReducedTensor,
        ] {
            let c = TruncatedCoalgebra::new(sp.clone(), flavor, 4).unwrap();
            assert_eq!(c.coassociativity_witness(), None, "{flavor:?}");
        }
        // Δ(1) = 1 ⊗ 1 in the unital case.
        let c = TruncatedCoalgebra::new(sp, CoalgebraFlavor::Symmetric, 2).unwrap();
        assert_eq!(c.coproduct(&[]), LinComb::single((vec![], vec![])));
    }

    #[test]
    fn alpha_is_an_abelian_family_of_coderivations() {
        let sp = GradedSpace::new(vec![-1, 0]);
        let alg = unital_coderivations(sp, Flavor::Symmetric, 3).unwrap();
        let ws = [vec_of(&[(0, 1)]), vec_of(&[(1, 1)]), vec_of(&[(1, 3)])];
        for w in &ws {
            let a = alpha(&alg, w).unwrap();
            assert_eq!(unit_value(&a).unwrap(), *w);
            assert_eq!(a.check_coleibniz().unwrap(), None);
            for v in &ws {
                let b = alpha(&alg, v).unwrap();
                assert!(Coderivation::commutator(&a, &b).unwrap().coeffs().is_zero());
            }
        }
        // α_w acts by multiplication.
        let a = alpha(&alg, &vec_of(&[(1, 1)])).unwrap();
        assert_eq!(a.apply_word(&[0]), LinComb::single(vec![0, 1]));
        assert!(matches!(alpha(&alg, &vec_of(&[(0, 1), (1, 1)])), Err(Error::Degree(_))));
    }

    #[test]
    fn unit_values_lie_in_w() {
        let sp = GradedSpace::new(vec![-1, 0]);
        let alg = unital_coderivations(sp, Flavor::Symmetric, 3).unwrap();
        let keys = full_basis(&alg);
        for (i, k) in keys.iter().enumerate().step_by(3) {
            let mut c = LinComb::single(k.clone());
            if let Some(k2) = keys.get(i + 1) {
                c.add_term(k2.clone(), q(2));
            }
            let tau = Coderivation::new(alg.clone(), c).unwrap();
            assert!(unit_value(&tau).is_ok());
        }
    }

    #[test]
    fn j_preserves_brackets_and_kills_the_unit() {
        let sp = GradedSpace::new(vec![-1, 0]);
        let red = CoderAlgebra::new(Flavor::Symmetric, sp, 1, 3, Overflow::Quotient).unwrap();
        let keys = full_basis(&red);
        let zero = Coderivation::new(red.clone(), LinComb::zero()).unwrap();
        assert!(embed_j(&zero).unwrap().coeffs().is_zero());
        for (i, a) in keys.iter().enumerate().step_by(4) {
            for b in keys.iter().skip(i % 3).step_by(5) {
                let x = Coderivation::new(red.clone(), LinComb::single(a.clone())).unwrap();
                let y = Coderivation::new(red.clone(), LinComb::single(b.clone())).unwrap();
                let (jx, jy) = (embed_j(&x).unwrap(), embed_j(&y).unwrap());
                assert!(jx.apply_word(&[]).is_zero());
                let lhs: HomElem = bracket(jx.algebra(), jx.coeffs(), jy.coeffs()).unwrap();
                let rhs: HomElem = bracket(&red, x.coeffs(), y.coeffs()).unwrap();
                assert_eq!(lhs, rhs);
                // Agreement on words of positive length.
                for w in red.words(2) {
                    assert_eq!(jx.apply_word(&w), x.apply_word(&w));
                }
            }
        }
        let unital = unital_coderivations(GradedSpace::new(vec![0]), Flavor::Symmetric, 2).unwrap();
        let bad = Coderivation::new(unital, LinComb::single(CoderKey::new(vec![], 0))).unwrap();
        assert!(matches!(embed_j(&bad), Err(Error::Input(_))));
    }

    #[test]
    fn unit_vdata_is_valid_and_filtered() {
        for (name, l) in registered_examples().into_iter().take(3) {
            let vd = keyli_vdata(&l, 3).unwrap();
            let r = validate_vdata(&vd).unwrap();
            assert!(r.is_valid() && r.is_flat(), "{name}: {r:?}");
            assert!(check_filtration(&vd).unwrap().passes(), "{name}");
        }
    }

    #[test]
    fn keyli_round_trip() {
        for (name, l) in registered_examples() {
            for n in 1..=3 {
                let inputs: Vec<_> = (0..n).map(|i| LinComb::single(i % l.space().dim())).collect();
                if inputs.len() <= 3 {
                    let r: Vector = linf_relation_residual(&l, &inputs).unwrap();
                    assert!(r.is_zero(), "{name} is not L∞");
                }
            }
            let rec = keyli_recover(&l, 4).unwrap();
            assert!(rec.matches(), "{name}: {:?}", rec.mismatch);
        }
        let (_, l) = &registered_examples()[4];
        assert!(matches!(keyli_recover(l, 2), Err(Error::CutoffOverflow { .. })));
    }

    #[test]
    fn keyli_differential_only() {
        let (_, l) = &registered_examples()[0];
        let rec = keyli_recover(l, 3).unwrap();
        assert_eq!(rec.recovered.table(1).unwrap().eval_basis(&[0]), vec_of(&[(1, 1)]));
        for n in 2..=3 {
            assert!(rec.recovered.table(n).unwrap().is_zero());
        }
    }

    #[test]
    fn pair_statement_both_directions() {
        // W = span(e_0 [0], e_1 [1]), Θ̃ with m_2(e_0, e_0) = c e_1, m_1 = 0: every Φ̃ = t e_0 has
        // residual c t²/2, and Θ̃ is homological.
        let sp = GradedSpace::new(vec![0, 1]);
        let red = CoderAlgebra::new(Flavor::Symmetric, sp.clone(), 1, 3, Overflow::Quotient).unwrap();
        let mut seen = [false, false];
        for c in [0i64, 1, -2] {
            for extra in [0i64, 1] {
                // `extra` adds m_3(e_0, e_0, e_0) = e_1, which still self-commutes.
                let mut coeffs = HomElem::zero();
                coeffs.add_term(CoderKey::new(vec![0, 0], 1), q(c));
                coeffs.add_term(CoderKey::new(vec![0, 0, 0], 1), q(extra));
                let theta = Coderivation::new(red.clone(), coeffs).unwrap();
                for t in [0i64, 1, 2] {
                    let phi = vec_of(&[(0, t)]);
                    let p = mcli_pair_check(&theta, &phi).unwrap();
                    assert!(p.agrees(), "{c} {extra} {t}: {p:?}");
                    seen[usize::from(p.pair_is_mc)] = true;
                }
            }
        }
        // Not homological: m_1(e_1) = e_2 and m_2(e_0, e_0) = e_1 on degrees 0, 1, 2.
        let sp3 = GradedSpace::new(vec![0, 1, 2]);
        let red3 = CoderAlgebra::new(Flavor::Symmetric, sp3, 1, 3, Overflow::Quotient).unwrap();
        let mut coeffs = HomElem::zero();
        coeffs.add_term(CoderKey::new(vec![1], 2), q(1));
        coeffs.add_term(CoderKey::new(vec![0, 0], 1), q(1));
        let theta = Coderivation::new(red3, coeffs).unwrap();
        for t in [0i64, 1] {
            let p = mcli_pair_check(&theta, &vec_of(&[(0, t)])).unwrap();
            assert!(!p.homological && !p.pair_is_mc && p.agrees());
        }
        assert!(seen[0] && seen[1]);
    }

    fn heisenberg_target() -> (DirectLInf, DirectLInf, MultilinearMap, MultilinearMap) {
        // U = Heisenberg on the shift, V = span(f_0, f_1, f_2 [-1], c [-2]) with ν_1(c) = f_2.
        let (_, u) = registered_examples().remove(2);
        let vsp = GradedSpace::new(vec![-1, -1, -1, -2]);
        let mut d = MultilinearMap::new(vsp.clone(), vsp.clone(), 1, 1, true);
        d.add_entry(&[3], 2, q(1)).unwrap();
        let v = DirectLInf::new(vsp.clone(), vec![d]).unwrap();
        let mut phi1 = MultilinearMap::new(u.space().clone(), vsp.clone(), 1, 0, true);
        for i in 0..3 {
            phi1.add_entry(&[i], i, q(1)).unwrap();
        }
        let phi2 = MultilinearMap::new(u.space().clone(), vsp, 2, 0, true);
        (u, v, phi1, phi2)
    }

    #[test]
    fn zero_family_is_a_morphism() {
        let (u, v, _, _) = heisenberg_target();
        let s = LinfMorphismSetup::new(&u, &v, 3).unwrap();
        assert!(s.residual_direct(&[]).unwrap().is_zero());
        assert!(s.residual_mc(&[]).unwrap().is_zero());
    }

    #[test]
    fn second_taylor_component_corrects_a_non_strict_map() {
        let (u, v, phi1, phi2) = heisenberg_target();
        let s = LinfMorphismSetup::new(&u, &v, 3).unwrap();
        let r0 = s.residual_direct(&[phi1.clone(), phi2.clone()]).unwrap();
        assert!(!r0.is_zero());
        // Solve the s = 2 equation for Φ_2(e_0 e_1) = t c: the residual is affine in t.
        let mut unit = phi2.clone();
        unit.add_entry(&[0, 1], 3, q(1)).unwrap();
        let r1 = s.residual_direct(&[phi1.clone(), unit]).unwrap();
        let key = CoderKey::new(vec![0, 1], (3 + 2) as u16);
        let (a, b) = (r0.coeff(&key), r1.coeff(&key) - r0.coeff(&key));
        let t = -a / b;
        let mut fixed = phi2.clone();
        fixed.add_entry(&[0, 1], 3, t.clone()).unwrap();
        let fam = [phi1.clone(), fixed];
        assert!(s.residual_direct(&fam).unwrap().is_zero());
        assert!(s.residual_mc(&fam).unwrap().is_zero());
        let mut off = phi2;
        off.add_entry(&[0, 1], 3, t * q(2)).unwrap();
        let fam = [phi1, off];
        assert!(!s.residual_direct(&fam).unwrap().is_zero());
        assert_eq!(s.residual_mc(&fam).unwrap(), s.residual_direct(&fam).unwrap().neg());
    }

    #[test]
    fn mc_residual_is_minus_direct_residual() {
        let (u, v, phi1, _) = heisenberg_target();
        let s = LinfMorphismSetup::new(&u, &v, 3).unwrap();
        let vsp = v.space().clone();
        for seed in 0..6i64 {
            let mut f1 = MultilinearMap::new(u.space().clone(), vsp.clone(), 1, 0, true);
            let mut f2 = MultilinearMap::new(u.space().clone(), vsp.clone(), 2, 0, true);
            for i in 0..3 {
                for j in 0..3 {
                    let c = (seed * 7 + (i * 3 + j) as i64 * 5) % 3 - 1;
                    f1.add_entry(&[i], j, q(c)).unwrap();
                }
            }
            f2.add_entry(&[0, 1], 3, q(seed - 2)).unwrap();
            f2.add_entry(&[1, 2], 3, q(seed % 2)).unwrap();
            let fam = [f1, f2];
            assert_eq!(s.residual_mc(&fam).unwrap(), s.residual_direct(&fam).unwrap().neg(), "seed {seed}");
        }
        let r = s.residual_direct(&[phi1]).unwrap();
        assert!(!r.is_zero());
    }

    #[test]
    fn morphism_vdata_is_valid_and_filtered() {
        let (u, v, _, _) = heisenberg_target();
        let s = LinfMorphismSetup::new(&u, &v, 2).unwrap();
        let r = validate_vdata(s.vdata()).unwrap();
        assert!(r.is_valid() && r.is_flat(), "{r:?}");
        assert!(check_filtration(s.vdata()).unwrap().passes());
    }

    #[test]
    fn ordered_partition_counts() {
        // Surjections onto n labelled blocks: 3 elements, 2 blocks -> 6.
        assert_eq!(ordered_partitions(3, 2).len(), 6);
        assert_eq!(ordered_partitions(3, 3).len(), 6);
        assert_eq!(ordered_partitions(2, 3).len(), 0);
    }

    #[test]
    fn symmetrization_of_associative_products() {
        use crate::assoc_deform::{encode_product, tensor_coderivations, AssocPresentation};
        // 2 × 2 upper triangular matrices E_00, E_01, E_11: not commutative.
        let upper = AssocPresentation::from_entries(
            3,
            &[(0, 0, 0, q(1)), (0, 1, 1, q(1)), (1, 2, 1, q(1)), (2, 2, 2, q(1))],
        )
        .unwrap();
        for (p, commutative) in [(AssocPresentation::dual_numbers(), true), (upper, false)] {
            let alg = tensor_coderivations(p.dim(), 3).unwrap();
            let theta = Coderivation::new(alg, encode_product(&p, 0)).unwrap();
            let s = symmetrize_ainf(&theta).unwrap();
            assert!(s.agrees());
            let m2 = s.linf.table(2).unwrap();
            assert_eq!(m2.is_zero(), commutative);
            // m_2(sa, sb) = s(ab - ba).
            for i in 0..p.dim() {
                for j in 0..p.dim() {
                    let (a, b) = (p.basis_vector(i), p.basis_vector(j));
                    let comm: Vec<Rational> =
                        p.product(&a, &b).into_iter().zip(p.product(&b, &a)).map(|(x, y)| x - y).collect();
                    let expected = LinComb::from_terms(comm.into_iter().enumerate());
                    assert_eq!(m2.eval_basis(&[i, j]), expected);
                }
            }
            let ins: Vec<Vector> = (0..3).map(|i| LinComb::single(i % p.dim())).collect();
            assert!(linf_relation_residual::<Rational, _>(&s.linf, &ins).unwrap().is_zero());
        }
        let zero = Coderivation::new(tensor_coderivations(2, 3).unwrap(), LinComb::zero()).unwrap();
        let s = symmetrize_ainf(&zero).unwrap();
        assert!(s.linf.tables().iter().all(|t| t.is_zero()));
    }

    fn phi_coder(s: &LinfMorphismSetup, fam: &[MultilinearMap]) -> Coderivation {
        Coderivation::new(s.coderivations().clone(), s.encode_family(fam).unwrap()).unwrap()
    }

    fn pr_v(s: &LinfMorphismSetup, x: &LinComb<Word>) -> Vector {
        let du = s.dim_u();
        LinComb::from_terms(
            x.iter().filter(|(w, _)| w.len() == 1 && w[0] as usize >= du).map(|(w, c)| (w[0] as usize - du, c.clone())),
        )
    }

    fn power(c: &Coderivation, t: usize, x: &LinComb<Word>) -> LinComb<Word> {
        (0..t).fold(x.clone(), |acc, _| c.apply(&acc))
    }

    fn mixed_setup() -> (LinfMorphismSetup, Vec<MultilinearMap>) {
        // U = span(e_0 [-1], e_1 [0]) with m_1(e_0) = e_1 and m_2(e_0, e_1) = e_1 is not L∞ (d m_2 ≠ 0)
        // so keep U = Heisenberg and V the differential target.
        let (u, v, phi1, mut phi2) = heisenberg_target();
        phi2.add_entry(&[0, 1], 3, q(1)).unwrap();
        phi2.add_entry(&[1, 2], 3, q(-1)).unwrap();
        (LinfMorphismSetup::new(&u, &v, 3).unwrap(), vec![phi1, phi2])
    }

    #[test]
    fn powers_of_phi_are_sums_over_partitions() {
        let (s, fam) = mixed_setup();
        let pc = phi_coder(&s, &fam);
        let alg = s.coderivations();
        let du = s.dim_u();
        let u_space = s.mu.space().clone();
        let u_alg = CoderAlgebra::new(Flavor::Symmetric, u_space.clone(), 1, 3, Overflow::Quotient).unwrap();
        for len in 1..=3 {
            for w in u_alg.words(len) {
                let degs: Vec<i32> = w.iter().map(|&i| u_space.degree(i as usize)).collect();
                for t in 0..=2 {
                    let lhs = power(&pc, t, &LinComb::single(w.clone()));
                    // Σ over I_1..I_t non-empty and I_{t+1} arbitrary.
                    let mut rhs: LinComb<Word> = LinComb::zero();
                    for blocks in ordered_partitions(len, t + 1).into_iter().chain(
                        ordered_partitions(len, t).into_iter().map(|mut b| {
                            b.push(vec![]);
                            b
                        }),
                    ) {
                        let images: Vec<usize> = blocks.iter().flatten().copied().collect();
                        let eps = koszul_sign(&Permutation::from_images(images).unwrap(), &degs);
                        // Products Φ(U_{I_1})⋯Φ(U_{I_t}) · U_{I_{t+1}} expanded in the basis.
                        let mut terms: Vec<(Vec<u16>, Rational)> = vec![(vec![], q(eps as i64))];
                        for b in &blocks[..t] {
                            let Some(f) = family_member(&fam, b.len()) else {
                                terms.clear();
                                break;
                            };
                            let inp: Vec<usize> = b.iter().map(|&i| w[i] as usize).collect();
                            let val = f.eval_basis(&inp);
                            let mut next = Vec::new();
                            for (word, c) in &terms {
                                for (k, v) in val.iter() {
                                    let mut w2 = word.clone();
                                    w2.push((du + k) as u16);
                                    next.push((w2, c * v));
                                }
                            }
                            terms = next;
                        }
                        for (mut word, c) in terms {
                            word.extend(blocks[t].iter().map(|&i| w[i]));
                            if let Some((sg, nw)) = alg.normalize(&word) {
                                rhs.add_term(nw, c * q(sg as i64));
                            }
                        }
                    }
                    assert_eq!(lhs, rhs, "word {w:?}, t = {t}");
                }
            }
        }
    }

    #[test]
    fn vanishing_patterns_of_projected_composites() {
        let (s, fam) = mixed_setup();
        let pc = phi_coder(&s, &fam);
        let du = s.dim_u();
        let mu = Coderivation::new(s.coderivations().clone(), encode_tables(s.mu.tables(), 0, 0).unwrap()).unwrap();
        let nu = Coderivation::new(s.coderivations().clone(), encode_tables(s.nu.tables(), du, du).unwrap()).unwrap();
        let u_alg = CoderAlgebra::new(Flavor::Symmetric, s.mu.space().clone(), 1, 3, Overflow::Quotient).unwrap();
        for len in 1..=3 {
            for w in u_alg.words(len) {
                let word: Vec<usize> = w.iter().map(|&i| i as usize).collect();
                let x = LinComb::single(w.clone());
                for k in 0..=2 {
                    for l in 0..=2 {
                        let n = k + l;
                        let via_nu = pr_v(&s, &power(&pc, k, &nu.apply(&power(&pc, l, &x))));
                        if l == n {
                            assert_eq!(via_nu, s.rhs_term_at(&fam, &word, n).scale(&factorial(n)), "{w:?} {k} {l}");
                        } else {
                            assert!(via_nu.is_zero(), "ν pattern {w:?} {k} {l}");
                        }
                        let via_mu = pr_v(&s, &power(&pc, k, &mu.apply(&power(&pc, l, &x))));
                        if k == 1 && n == 1 {
                            assert_eq!(via_mu, s.lhs_at(&fam, &word), "{w:?}");
                        } else {
                            assert!(via_mu.is_zero(), "μ pattern {w:?} {k} {l}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn kernel_of_unit_projection_is_image_of_j() {
        let sp = GradedSpace::new(vec![-1, 0]);
        let alg = unital_coderivations(sp.clone(), Flavor::Symmetric, 3).unwrap();
        let red = CoderAlgebra::new(Flavor::Symmetric, sp, 1, 3, Overflow::Quotient).unwrap();
        let ker: Vec<CoderKey> = full_basis(&alg).into_iter().filter(|k| k.arity() > 0).collect();
        let image: Vec<CoderKey> = full_basis(&red);
        assert_eq!(ker, image);
        for k in ker.iter().step_by(4) {
            let tau = Coderivation::new(alg.clone(), LinComb::single(k.clone())).unwrap();
            assert!(unit_value(&tau).unwrap().is_zero());
        }
    }
}
