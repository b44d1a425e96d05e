//! Associative algebras as quadratic coderivations of the tensor coalgebra, morphisms as
//! Maurer-Cartan elements, and the written-out multibrackets controlling simultaneous
//! deformations of two algebras and a morphism.

use crate::error::{Error, Result};
use crate::graded_core::linalg::{mat_vec, Matrix};
use crate::graded_core::{koszul_sign, q, Coeff, GradedSpace, LinComb, Permutation, Rational};
use crate::graded_lie::{split_by_degree, CoderAlgebra, CoderKey, Coderivation, Flavor, GradedLie, Overflow};
use crate::vdata::{mc_residual, BigElem, DerivedAlgebra, LInfinity, VData, Weight};
use std::sync::Arc;

/// Sparse multilinear maps `T^n(W) -> W` on the shifted letters, keyed by input word and output.
pub type HomElem<S = Rational> = LinComb<CoderKey, S>;

/// Product constants `e_i e_j = Σ_k m_{ij}^k e_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct AssocPresentation {
    table: Vec<Vec<Vec<Rational>>>,
}

impl AssocPresentation {
    pub fn zero(dim: usize) -> Self {
        AssocPresentation { table: vec![vec![vec![q(0); dim]; dim]; dim] }
    }

    pub fn from_entries(dim: usize, entries: &[(usize, usize, usize, Rational)]) -> Result<Self> {
        let mut p = Self::zero(dim);
        for (i, j, k, c) in entries {
            if *i >= dim || *j >= dim || *k >= dim {
                return Err(Error::SizeMismatch(format!("index ({i},{j},{k}) out of range for dimension {dim}")));
            }
            p.table[*i][*j][*k] += c.clone();
        }
        Ok(p)
    }

    pub fn from_table(table: Vec<Vec<Vec<Rational>>>) -> Result<Self> {
        let n = table.len();
        if table.iter().any(|r| r.len() != n || r.iter().any(|v| v.len() != n)) {
            return Err(Error::SizeMismatch("product table must be n × n × n".into()));
        }
        Ok(AssocPresentation { table })
    }

    /// `k[x]/(x²)` on the basis `{1, x}`.
    pub fn dual_numbers() -> Self {
        Self::from_entries(2, &[(0, 0, 0, q(1)), (0, 1, 1, q(1)), (1, 0, 1, q(1))]).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &Vec<Vec<Vec<Rational>>> {
        &self.table
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.table[i][j][k]
    }

    pub fn product(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let n = self.dim();
        let mut out = vec![q(0); n];
        for i in 0..n {
            if Coeff::is_zero(&x[i]) {
                continue;
            }
            for j in 0..n {
                if Coeff::is_zero(&y[j]) {
                    continue;
                }
                let c = x[i].clone() * y[j].clone();
                for (k, o) in out.iter_mut().enumerate() {
                    *o += c.clone() * self.table[i][j][k].clone();
                }
            }
        }
        out
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Rational> {
        (0..self.dim()).map(|j| if i == j { q(1) } else { q(0) }).collect()
    }

    /// First basis triple with `(e_i e_j) e_k ≠ e_i (e_j e_k)`.
    pub fn associativity_witness(&self) -> Option<(usize, usize, usize)> {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let (a, b, c) = (self.basis_vector(i), self.basis_vector(j), self.basis_vector(k));
                    if self.product(&self.product(&a, &b), &c) != self.product(&a, &self.product(&b, &c)) {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    pub fn add(&self, other: &AssocPresentation) -> Result<AssocPresentation> {
        if self.dim() != other.dim() {
            return Err(Error::SizeMismatch("product tables of different dimensions".into()));
        }
        let n = self.dim();
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out.table[i][j][k] += other.table[i][j][k].clone();
                }
            }
        }
        Ok(out)
    }
}

/// The quadratic Taylor coefficient `Q¹_2(s e_i ⊗ s e_j) = Σ m_{ij}^k s e_k` on letters `offset..`.
pub fn encode_product<S: Coeff>(p: &AssocPresentation, offset: usize) -> HomElem<S> {
    let n = p.dim();
    let mut out = HomElem::zero();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let c = &p.table[i][j][k];
                if !Coeff::is_zero(c) {
                    let key = CoderKey::new(vec![(offset + i) as u16, (offset + j) as u16], (offset + k) as u16);
                    out.add_term(key, S::from_rational(c));
                }
            }
        }
    }
    out
}

/// Tensor coderivations of `T^c(W[1])` with `W` concentrated in degree 0.
pub fn tensor_coderivations(dim: usize, cutoff: usize) -> Result<CoderAlgebra> {
    CoderAlgebra::new(Flavor::Tensor, GradedSpace::concentrated(dim, -1), 1, cutoff, Overflow::Quotient)
}

#[derive(Clone, Debug)]
pub struct EncodedAssoc {
    pub coderivation: Coderivation,
    pub associative: bool,
    /// Inputs of a non-vanishing coefficient of `[Q, Q]`.
    pub witness: Option<(usize, usize, usize)>,
}

pub fn encode_assoc(p: &AssocPresentation) -> Result<EncodedAssoc> {
    let alg = tensor_coderivations(p.dim(), 3)?.with_overflow(Overflow::Strict);
    let coder = Coderivation::new(alg, encode_product(p, 0))?;
    let sq = Coderivation::commutator(&coder, &coder)?;
    let witness = sq.coeffs().keys().next().map(|k| (k.inputs[0] as usize, k.inputs[1] as usize, k.inputs[2] as usize));
    Ok(EncodedAssoc { coderivation: coder, associative: sq.coeffs().is_zero(), witness })
}

/// One slot of a composite: keep the letter or substitute a map.
#[derive(Clone, Copy)]
pub enum Slot<'a, S: Coeff> {
    Keep,
    Fill(&'a HomElem<S>),
}

/// `f ∘ (g_1 ⊗ ... ⊗ g_N)` on the arity-`N` part of `f`, with the Koszul sign of moving each
/// `g_s` past the inputs of the earlier slots. Keys above `cutoff` are dropped.
pub fn plug<S: Coeff>(outer: &HomElem<S>, plan: &[Slot<'_, S>], cutoff: usize) -> HomElem<S> {
    let mut out = HomElem::zero();
    for (f, c) in outer.iter() {
        if f.arity() != plan.len() {
            continue;
        }
        fill(f, plan, 0, Vec::new(), 0, 0, c.clone(), cutoff, &mut out);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn fill<S: Coeff>(
    f: &CoderKey,
    plan: &[Slot<'_, S>],
    s: usize,
    inputs: Vec<u16>,
    prefix: usize,
    sign: usize,
    c: S,
    cutoff: usize,
    out: &mut HomElem<S>,
) {
    if inputs.len() > cutoff {
        return;
    }
    if s == plan.len() {
        let c = if sign % 2 == 1 { c.neg() } else { c };
        out.add_term(CoderKey::new(inputs, f.output), c);
        return;
    }
    match plan[s] {
        Slot::Keep => {
            let mut w = inputs;
            w.push(f.inputs[s]);
            fill(f, plan, s + 1, w, prefix + 1, sign, c, cutoff, out);
        }
        Slot::Fill(g) => {
            for (k, d) in g.iter() {
                if k.output != f.inputs[s] {
                    continue;
                }
                let mut w = inputs.clone();
                w.extend_from_slice(&k.inputs);
                let extra = (k.arity() - 1) * prefix;
                fill(f, plan, s + 1, w, prefix + k.arity(), sign + extra, c.mul(d), cutoff, out);
            }
        }
    }
}

fn arities<S: Coeff>(x: &HomElem<S>) -> Vec<usize> {
    let mut a: Vec<usize> = x.keys().map(|k| k.arity()).collect();
    a.sort_unstable();
    a.dedup();
    a
}

fn of_arity<S: Coeff>(x: &HomElem<S>, n: usize) -> HomElem<S> {
    x.filter(|k| k.arity() == n)
}

/// `Σ_i f ∘_i g`.
pub fn circ<S: Coeff>(f: &HomElem<S>, g: &HomElem<S>, cutoff: usize) -> HomElem<S> {
    let mut out = HomElem::zero();
    for n in arities(f) {
        for i in 0..n {
            let plan: Vec<Slot<S>> = (0..n).map(|s| if s == i { Slot::Fill(g) } else { Slot::Keep }).collect();
            out = out.add(&plug(f, &plan, cutoff));
        }
    }
    out
}

/// Gerstenhaber bracket `f ∘ g - (-1)^{|f||g|} g ∘ f`, degree of a key being its arity minus one.
pub fn gerstenhaber<S: Coeff>(f: &HomElem<S>, g: &HomElem<S>, cutoff: usize) -> HomElem<S> {
    let mut out = HomElem::zero();
    for nf in arities(f) {
        let fp = of_arity(f, nf);
        for ng in arities(g) {
            let gp = of_arity(g, ng);
            out = out.add(&circ(&fp, &gp, cutoff));
            let back = circ(&gp, &fp, cutoff);
            out = if (nf - 1) * (ng - 1) % 2 == 1 { out.add(&back) } else { out.sub(&back) };
        }
    }
    out
}

/// V-data for morphisms `U → V`: coderivations of `T^c((U ⊕ V)[1])`, with `a` the maps from
/// `U`-words to `V` and `Δ = μ + ν`.
#[derive(Clone)]
pub struct AssocSetup {
    pub u: AssocPresentation,
    pub v: AssocPresentation,
    pub mu: HomElem,
    pub nu: HomElem,
    alg: Arc<CoderAlgebra>,
    vdata: VData<CoderAlgebra>,
}

pub fn assoc_vdata(u: &AssocPresentation, v: &AssocPresentation) -> Result<AssocSetup> {
    AssocSetup::new(u, v, 3)
}

impl AssocSetup {
    /// `cutoff` bounds the word length; it must be at least 2.
    pub fn new(u: &AssocPresentation, v: &AssocPresentation, cutoff: usize) -> Result<Self> {
        if cutoff < 2 {
            return Err(Error::Input("word-length cutoff must be at least 2".into()));
        }
        for (name, p) in [("U", u), ("V", v)] {
            if let Some(t) = p.associativity_witness() {
                return Err(Error::InvalidVData(format!("{name} is not associative at {t:?}")));
            }
        }
        let du = u.dim();
        let alg = Arc::new(tensor_coderivations(du + v.dim(), cutoff)?);
        let mu = encode_product(u, 0);
        let nu = encode_product(v, du);
        let in_a = move |k: &CoderKey| k.inputs.iter().all(|&i| (i as usize) < du) && k.output as usize >= du;
        let weight = Weight::new(cutoff as i32, move |k: &CoderKey| {
            k.inputs.iter().filter(|&&i| (i as usize) < du).count() as i32 + i32::from(k.output as usize >= du) - 1
        });
        let vdata = VData::new(alg.clone(), in_a, mu.add(&nu)).with_weight(weight);
        Ok(AssocSetup { u: u.clone(), v: v.clone(), mu, nu, alg, vdata })
    }

    pub fn coderivations(&self) -> &CoderAlgebra {
        &self.alg
    }

    pub fn vdata(&self) -> &VData<CoderAlgebra> {
        &self.vdata
    }

    pub fn cutoff(&self) -> usize {
        self.alg.cutoff()
    }

    pub fn dim_u(&self) -> usize {
        self.u.dim()
    }

    pub fn dim_v(&self) -> usize {
        self.v.dim()
    }

    fn is_u(&self, i: u16) -> bool {
        (i as usize) < self.dim_u()
    }

    pub fn is_u_coder(&self, k: &CoderKey) -> bool {
        self.is_u(k.output) && k.inputs.iter().all(|&i| self.is_u(i))
    }

    pub fn is_v_coder(&self, k: &CoderKey) -> bool {
        !self.is_u(k.output) && k.inputs.iter().all(|&i| !self.is_u(i))
    }

    pub fn in_l_prime(&self, k: &CoderKey) -> bool {
        self.is_u_coder(k) || self.is_v_coder(k)
    }

    pub fn encode_u(&self, p: &AssocPresentation) -> Result<HomElem> {
        if p.dim() != self.dim_u() {
            return Err(Error::SizeMismatch("product on U has the wrong dimension".into()));
        }
        Ok(encode_product(p, 0))
    }

    pub fn encode_v(&self, p: &AssocPresentation) -> Result<HomElem> {
        if p.dim() != self.dim_v() {
            return Err(Error::SizeMismatch("product on V has the wrong dimension".into()));
        }
        Ok(encode_product(p, self.dim_u()))
    }

    /// `Φ(s u_l) = Σ_η a[η][l] s v_η`.
    pub fn encode_map(&self, a: &Matrix) -> Result<HomElem> {
        let (du, dv) = (self.dim_u(), self.dim_v());
        if a.len() != dv || a.iter().any(|r| r.len() != du) {
            return Err(Error::SizeMismatch(format!("expected a {dv} × {du} matrix")));
        }
        let mut out = HomElem::zero();
        for (eta, row) in a.iter().enumerate() {
            for (l, c) in row.iter().enumerate() {
                out.add_term(CoderKey::new(vec![l as u16], (du + eta) as u16), c.clone());
            }
        }
        Ok(out)
    }

    /// `ν(Φ ⊗ Φ) - Φ ∘ μ`.
    pub fn morphism_residual(&self, phi: &HomElem) -> HomElem {
        let c = self.cutoff();
        plug(&self.nu, &[Slot::Fill(phi), Slot::Fill(phi)], c).sub(&plug(phi, &[Slot::Fill(&self.mu)], c))
    }

    /// `φ(e_i)φ(e_j) - φ(e_i e_j)` on basis pairs.
    pub fn homomorphism_defect(&self, a: &Matrix) -> Vec<((usize, usize), Vec<Rational>)> {
        let n = self.dim_u();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let (x, y) = (self.u.basis_vector(i), self.u.basis_vector(j));
                let lhs = self.v.product(&mat_vec(a, &x), &mat_vec(a, &y));
                let rhs = mat_vec(a, &self.u.product(&x, &y));
                out.push(((i, j), lhs.into_iter().zip(rhs).map(|(l, r)| l - r).collect()));
            }
        }
        out
    }

    pub fn is_morphism_direct(&self, a: &Matrix) -> bool {
        self.homomorphism_defect(a).iter().all(|(_, d)| d.iter().all(Coeff::is_zero))
    }

    pub fn is_morphism_mc(&self, a: &Matrix) -> Result<bool> {
        Ok(mc_residual(&DerivedAlgebra::new(&self.vdata), &self.encode_map(a)?)?.is_zero())
    }

    pub fn twisted(&self, a: &Matrix) -> Result<VData<CoderAlgebra>> {
        self.vdata.twist(&self.encode_map(a)?)
    }

    /// The written-out brackets on `L'[1] ⊕ a` twisted by a morphism.
    pub fn markl(&self, a: &Matrix) -> Result<MarklAlgebra<'_>> {
        let phi = self.encode_map(a)?;
        if !self.morphism_residual(&phi).is_zero() {
            return Err(Error::NotMaurerCartan);
        }
        Ok(MarklAlgebra { setup: self, phi })
    }

    pub fn a_basis(&self, degree: i32) -> Vec<CoderKey> {
        self.vdata.abelian_basis(degree)
    }

    pub fn l_prime_basis(&self, degree: i32) -> Vec<CoderKey> {
        self.alg.basis(degree).into_iter().filter(|k| self.in_l_prime(k)).collect()
    }
}

#[derive(Clone)]
enum Piece<S: Coeff> {
    U(usize, HomElem<S>),
    V(usize, HomElem<S>),
    A(usize, HomElem<S>),
}

impl<S: Coeff> Piece<S> {
    fn arity(&self) -> usize {
        match self {
            Piece::U(n, _) | Piece::V(n, _) | Piece::A(n, _) => *n,
        }
    }
    /// Degree in `L'[1] ⊕ a`.
    fn degree(&self) -> i32 {
        match self {
            Piece::U(n, _) | Piece::V(n, _) => *n as i32 - 2,
            Piece::A(n, _) => *n as i32 - 1,
        }
    }
    fn map(&self) -> &HomElem<S> {
        match self {
            Piece::U(_, x) | Piece::V(_, x) | Piece::A(_, x) => x,
        }
    }
    fn is_l(&self) -> bool {
        !matches!(self, Piece::A(..))
    }
}

/// Brackets on `L'[1] ⊕ a` from explicit compositions: the differential, `{x, a}`,
/// `{x, a_1, ..., a_m}` through insertions into `x_V`, and the pure binary bracket.
pub struct MarklAlgebra<'a> {
    setup: &'a AssocSetup,
    phi: HomElem,
}

impl<'a> MarklAlgebra<'a> {
    pub fn phi(&self) -> &HomElem {
        &self.phi
    }

    fn pieces<S: Coeff>(&self, x: &BigElem<CoderKey, S>) -> Result<Vec<Piece<S>>> {
        let s = self.setup;
        let u = x.l.filter(|k| s.is_u_coder(k));
        let v = x.l.filter(|k| s.is_v_coder(k));
        if u.len() + v.len() != x.l.len() {
            return Err(Error::Input("L[1]-part outside the coderivations of U[1] and V[1]".into()));
        }
        if !s.vdata.is_in_abelian(&x.a) {
            return Err(Error::NotInAbelian(format!("{:?}", x.a)));
        }
        let mut out = Vec::new();
        for n in arities(&u) {
            out.push(Piece::U(n, of_arity(&u, n)));
        }
        for n in arities(&v) {
            out.push(Piece::V(n, of_arity(&v, n)));
        }
        for n in arities(&x.a) {
            out.push(Piece::A(n, of_arity(&x.a, n)));
        }
        Ok(out)
    }

    /// `Σ_{I} ε(I) h ∘_{I,Φ} (a_1, ..., a_m)` over ordered tuples of distinct slots of the
    /// arity-`n` map `h`, with `Φ` in the unused slots.
    fn insert_all<S: Coeff>(&self, h: &HomElem<S>, n: usize, args: &[Piece<S>]) -> HomElem<S> {
        let m = args.len();
        let phi: HomElem<S> = self.phi.lift();
        let degs: Vec<i32> = args.iter().map(|p| p.arity() as i32 - 1).collect();
        let mut out = HomElem::zero();
        for slots in ordered_tuples(n, m) {
            // Order in which the arguments appear left to right.
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by_key(|&j| slots[j]);
            let eps = koszul_sign(&Permutation::from_images(order.clone()).expect("permutation"), &degs);
            let plan: Vec<Slot<S>> = (0..n)
                .map(|s| match slots.iter().position(|&t| t == s) {
                    Some(j) => Slot::Fill(args[j].map()),
                    None => Slot::Fill(&phi),
                })
                .collect();
            let v = plug(h, &plan, self.setup.cutoff());
            out = if eps < 0 { out.sub(&v) } else { out.add(&v) };
        }
        out
    }

    /// `ν(a ⊗ Φ) + ν(Φ ⊗ a) - (-1)^{|a|} Σ_i a ∘_i μ`.
    fn da<S: Coeff>(&self, n: usize, a: &HomElem<S>) -> HomElem<S> {
        let c = self.setup.cutoff();
        let phi: HomElem<S> = self.phi.lift();
        let mu: HomElem<S> = self.setup.mu.lift();
        let nu: HomElem<S> = self.setup.nu.lift();
        let mut out = plug(&nu, &[Slot::Fill(a), Slot::Fill(&phi)], c).add(&plug(&nu, &[Slot::Fill(&phi), Slot::Fill(a)], c));
        let back = circ(a, &mu, c);
        out = if (n - 1) % 2 == 1 { out.add(&back) } else { out.sub(&back) };
        out
    }

    fn bracket_pieces<S: Coeff>(&self, args: &[Piece<S>]) -> Result<BigElem<CoderKey, S>> {
        let c = self.setup.cutoff();
        let phi: HomElem<S> = self.phi.lift();
        let mu: HomElem<S> = self.setup.mu.lift();
        let nu: HomElem<S> = self.setup.nu.lift();
        let l_pos: Vec<usize> = (0..args.len()).filter(|&i| args[i].is_l()).collect();
        match (args.len(), l_pos.len()) {
            (1, 0) => Ok(BigElem::from_a(self.da(args[0].arity(), args[0].map()))),
            (1, 1) => match &args[0] {
                Piece::U(_, x) => Ok(BigElem::new(gerstenhaber(&mu, x, c).neg(), plug(&phi, &[Slot::Fill(x)], c).neg())),
                Piece::V(n, x) => {
                    let plan: Vec<Slot<S>> = (0..*n).map(|_| Slot::Fill(&phi)).collect();
                    Ok(BigElem::new(gerstenhaber(&nu, x, c).neg(), plug(x, &plan, c)))
                }
                Piece::A(..) => unreachable!(),
            },
            (2, 0) => Ok(BigElem::from_a(self.insert_all(&nu, 2, args))),
            (2, 2) => {
                let v = gerstenhaber(args[0].map(), args[1].map(), c);
                let odd = (args[0].arity() - 1) % 2 == 1;
                Ok(BigElem::from_l(if odd { v.neg() } else { v }))
            }
            (_, 1) => {
                let i = l_pos[0];
                let before: i32 = args[..i].iter().map(|p| p.degree()).sum();
                let sign = (args[i].degree() * before).rem_euclid(2) == 1;
                let rest: Vec<Piece<S>> = args.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p.clone()).collect();
                let v = match &args[i] {
                    Piece::U(n, x) if rest.len() == 1 => {
                        let a = rest[0].map();
                        let back = circ(a, x, c);
                        if ((n - 1) * (rest[0].arity() - 1)) % 2 == 1 {
                            back
                        } else {
                            back.neg()
                        }
                    }
                    Piece::U(..) => HomElem::zero(),
                    Piece::V(n, _) if rest.len() > *n => HomElem::zero(),
                    Piece::V(n, x) => self.insert_all(x, *n, &rest),
                    Piece::A(..) => unreachable!(),
                };
                Ok(BigElem::from_a(if sign { v.neg() } else { v }))
            }
            _ => Ok(BigElem::default()),
        }
    }
}

/// Ordered `m`-tuples of distinct elements of `0..n`.
fn ordered_tuples(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..m {
        let mut next = Vec::new();
        for t in &out {
            for s in 0..n {
                if !t.contains(&s) {
                    let mut t2 = t.clone();
                    t2.push(s);
                    next.push(t2);
                }
            }
        }
        out = next;
    }
    out
}

impl<'a, S: Coeff> LInfinity<S> for MarklAlgebra<'a> {
    type Elem = BigElem<CoderKey, S>;
    type Coord = (bool, CoderKey);

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
        let alg = self.setup.coderivations();
        let mut by: std::collections::BTreeMap<i32, Self::Elem> = Default::default();
        for (d, f) in split_by_degree(alg, &x.l) {
            by.entry(d - 1).or_default().l = f;
        }
        for (d, f) in split_by_degree(alg, &x.a) {
            by.entry(d).or_default().a = f;
        }
        by.into_iter().collect()
    }
    fn coordinates(&self, x: &Self::Elem) -> Vec<((bool, CoderKey), S)> {
        let mut out: Vec<_> = x.l.iter().map(|(k, c)| ((false, k.clone()), c.clone())).collect();
        out.extend(x.a.iter().map(|(k, c)| ((true, k.clone()), c.clone())));
        out
    }
    fn curvature(&self) -> Result<Self::Elem> {
        Ok(BigElem::default())
    }
    fn bracket(&self, args: &[Self::Elem]) -> Result<Self::Elem> {
        let pieces: Vec<Vec<Piece<S>>> = args.iter().map(|x| self.pieces(x)).collect::<Result<_>>()?;
        if pieces.iter().any(|p| p.is_empty()) {
            return Ok(BigElem::default());
        }
        let mut total = BigElem::default();
        let mut choice = vec![0usize; args.len()];
        loop {
            let picked: Vec<Piece<S>> = choice.iter().enumerate().map(|(i, &c)| pieces[i][c].clone()).collect();
            let v = self.bracket_pieces(&picked)?;
            total = LInfinity::<S>::add(self, &total, &v);
            let mut i = 0;
            loop {
                if i == choice.len() {
                    return Ok(total);
                }
                choice[i] += 1;
                if choice[i] < pieces[i].len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }
    /// Nothing survives with more arguments than one `x_V` has slots, plus the `x` itself.
    fn series_bound(&self, fixed: &[Self::Elem], _phi: &Self::Elem) -> Result<usize> {
        Ok((self.setup.cutoff() + 1).saturating_sub(fixed.len()))
    }
}
