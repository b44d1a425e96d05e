//! Lie algebras as homological vector fields on `W[1]`, morphisms and subalgebras as
//! Maurer-Cartan elements, and the algebras governing their simultaneous deformations.

use crate::error::{Error, Result};
use crate::graded_core::linalg::{identity, inverse, lift_matrix, mat_mul, mat_vec, Matrix};
use crate::graded_core::{factorial, q, Coeff, LinComb, Rational};
use crate::graded_lie::odd::{self, Mask};
use crate::graded_lie::{bracket, nested_bracket, split_by_degree, GradedLie, VectorFields, VfKey};
use crate::vdata::big::BigElem;
use crate::vdata::linf::LInfinity;
use crate::vdata::{mc_residual, DerivedAlgebra, VData, Weight};
use std::sync::Arc;

pub type Field<S = Rational> = LinComb<VfKey, S>;

/// Structure constants `c[i][j][k] = c_{ij}^k`, antisymmetric in `i, j`.
#[derive(Clone, Debug, PartialEq)]
pub struct LiePresentation {
    c: Vec<Vec<Vec<Rational>>>,
}

impl LiePresentation {
    pub fn abelian(dim: usize) -> Self {
        LiePresentation { c: vec![vec![vec![q(0); dim]; dim]; dim] }
    }

    /// Sets `[e_i, e_j] = Σ_k c_{ij}^k e_k` from `(i, j, k, c)` entries (antisymmetry implied).
    pub fn from_entries(dim: usize, entries: &[(usize, usize, usize, Rational)]) -> Result<Self> {
        let mut p = LiePresentation::abelian(dim);
        for (i, j, k, v) in entries {
            if *i >= dim || *j >= dim || *k >= dim {
                return Err(Error::SizeMismatch(format!("index out of range for dimension {dim}")));
            }
            if i == j {
                if !Coeff::is_zero(v) {
                    return Err(Error::Input(format!("c_{{{i}{i}}}^{k} must vanish")));
                }
                continue;
            }
            p.c[*i][*j][*k] = v.clone();
            p.c[*j][*i][*k] = -v.clone();
        }
        Ok(p)
    }

    pub fn from_table(c: Vec<Vec<Vec<Rational>>>) -> Result<Self> {
        let n = c.len();
        for i in 0..n {
            if c[i].len() != n || c[i].iter().any(|r| r.len() != n) {
                return Err(Error::SizeMismatch("structure constants must be n × n × n".into()));
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if c[i][j][k] != -c[j][i][k].clone() {
                        return Err(Error::Input(format!("c_{{{i}{j}}}^{k} is not antisymmetric")));
                    }
                }
            }
        }
        Ok(LiePresentation { c })
    }

    /// The 2-dimensional non-abelian algebra, `[e_0, e_1] = e_0`.
    pub fn aff2() -> Self {
        LiePresentation::from_entries(2, &[(0, 1, 0, q(1))]).expect("valid constants")
    }

    /// `sl_2` in the basis `H, E, F`.
    pub fn sl2() -> Self {
        LiePresentation::from_entries(3, &[(0, 1, 1, q(2)), (0, 2, 2, q(-2)), (1, 2, 0, q(1))]).expect("valid constants")
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.c[i][j][k]
    }

    pub fn table(&self) -> &Vec<Vec<Vec<Rational>>> {
        &self.c
    }

    pub fn bracket(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
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
                for (k, o) in out.iter_mut().enumerate() {
                    *o += x[i].clone() * y[j].clone() * self.c[i][j][k].clone();
                }
            }
        }
        out
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Rational> {
        (0..self.dim()).map(|j| if i == j { q(1) } else { q(0) }).collect()
    }

    /// First basis triple on which the Jacobi sum fails, if any.
    pub fn jacobi_witness(&self) -> Option<(usize, usize, usize)> {
        let n = self.dim();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (x, y, z) = (self.basis_vector(i), self.basis_vector(j), self.basis_vector(k));
                    let t1 = self.bracket(&x, &self.bracket(&y, &z));
                    let t2 = self.bracket(&y, &self.bracket(&z, &x));
                    let t3 = self.bracket(&z, &self.bracket(&x, &y));
                    if (0..n).any(|m| !Coeff::is_zero(&(t1[m].clone() + t2[m].clone() + t3[m].clone()))) {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    /// `g^*[x, y] = g[g^{-1}x, g^{-1}y]`.
    pub fn pushforward(&self, g: &Matrix) -> Result<LiePresentation> {
        let ginv = inverse(g)?;
        Ok(LiePresentation { c: pushforward_constants(&self.c, g, &ginv) })
    }

    /// Constants in the basis given by the columns of `b`.
    pub fn change_basis(&self, b: &Matrix) -> Result<LiePresentation> {
        let binv = inverse(b)?;
        Ok(LiePresentation { c: pushforward_constants(&self.c, &binv, b) })
    }
}

/// `c'_{ij}^k = Σ g_{km} c_{ab}^m (g^{-1})_{ai} (g^{-1})_{bj}` over any coefficient ring.
pub fn pushforward_constants<S: Coeff>(c: &[Vec<Vec<S>>], g: &Matrix<S>, ginv: &Matrix<S>) -> Vec<Vec<Vec<S>>> {
    let n = c.len();
    let mut out = vec![vec![vec![S::zero(); n]; n]; n];
    for a in 0..n {
        for b in 0..n {
            for m in 0..n {
                if c[a][b][m].is_zero() {
                    continue;
                }
                for i in 0..n {
                    if ginv[a][i].is_zero() {
                        continue;
                    }
                    for j in 0..n {
                        let w = c[a][b][m].mul(&ginv[a][i]).mul(&ginv[b][j]);
                        if w.is_zero() {
                            continue;
                        }
                        for k in 0..n {
                            out[i][j][k] = out[i][j][k].add(&w.mul(&g[k][m]));
                        }
                    }
                }
            }
        }
    }
    out
}

/// `Q = -½ c_{ij}^k x_i x_j ∂_k` on the coordinates `offset..offset+n`.
pub fn encode_constants<S: Coeff>(c: &[Vec<Vec<S>>], offset: usize) -> Field<S> {
    let n = c.len();
    let mut out = Field::zero();
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                if c[i][j][k].is_zero() {
                    continue;
                }
                let (s, key) = VfKey::new(&[offset + i, offset + j], offset + k).expect("in range");
                // The (i,j) and (j,i) halves coincide after reordering the odd product.
                out.add_term(key, c[i][j][k].neg().scale(&q(s as i64)));
            }
        }
    }
    out
}

/// Inverse of [`encode_constants`] on quadratic fields supported on one block.
pub fn decode_constants(q_field: &Field, offset: usize, n: usize) -> Result<LiePresentation> {
    let mut p = LiePresentation::abelian(n);
    for (k, c) in q_field.iter() {
        let idx = odd::indices(k.mono);
        let t = k.target as usize;
        if idx.len() != 2 || idx.iter().any(|&i| i < offset || i >= offset + n) || t < offset || t >= offset + n {
            return Err(Error::Input(format!("{k:?} is not a quadratic field on the block")));
        }
        let (i, j) = (idx[0] - offset, idx[1] - offset);
        p.c[i][j][t - offset] = -c.clone();
        p.c[j][i][t - offset] = c.clone();
    }
    Ok(p)
}

pub fn encode_lie(p: &LiePresentation) -> Field {
    encode_constants(p.table(), 0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct JacobiReport {
    /// `[Q, Q] = 0`.
    pub homological: bool,
    /// Failing basis triple of the classical Jacobi sum.
    pub witness: Option<(usize, usize, usize)>,
}

pub fn jacobi(p: &LiePresentation) -> Result<JacobiReport> {
    let vf = VectorFields::new(p.dim())?;
    let qf = encode_lie(p);
    Ok(JacobiReport { homological: bracket(&vf, &qf, &qf)?.is_zero(), witness: p.jacobi_witness() })
}

/// The constant field `ι_X = Σ X_i ∂_{offset+i}`.
pub fn iota<S: Coeff>(x: &[S], offset: usize) -> Field<S> {
    let mut out = Field::zero();
    for (i, c) in x.iter().enumerate() {
        out.add_term(VfKey { mono: 0, target: (offset + i) as u8 }, c.clone());
    }
    out
}

/// `Φ = -A_{lη} x_l ∂_η` for `φ(e_l) = Σ_η A_{lη} f_η`; `a[η][l]` holds `A_{lη}`.
pub fn encode_linear_map<S: Coeff>(a: &Matrix<S>, src_offset: usize, tgt_offset: usize) -> Field<S> {
    let mut out = Field::zero();
    for (eta, row) in a.iter().enumerate() {
        for (l, c) in row.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let key = VfKey { mono: odd::bit(src_offset + l), target: (tgt_offset + eta) as u8 };
            out.add_term(key, c.neg());
        }
    }
    out
}

fn check_shape(a: &Matrix, rows: usize, cols: usize) -> Result<()> {
    if a.len() != rows || a.iter().any(|r| r.len() != cols) {
        return Err(Error::SizeMismatch(format!("expected a {rows} × {cols} matrix")));
    }
    Ok(())
}

/// The V-data on vector fields of `(U × V)[1]` whose Maurer-Cartan elements are morphisms `U → V`.
#[derive(Clone)]
pub struct MorphismSetup {
    pub u: LiePresentation,
    pub v: LiePresentation,
    pub q_u: Field,
    pub q_v: Field,
    vf: Arc<VectorFields>,
    vdata: VData<VectorFields>,
}

impl MorphismSetup {
    pub fn new(u: LiePresentation, v: LiePresentation) -> Result<Self> {
        let (du, dv) = (u.dim(), v.dim());
        let vf = Arc::new(VectorFields::new(du + dv)?);
        let q_u = encode_constants(u.table(), 0);
        let q_v = encode_constants(v.table(), du);
        let umask: Mask = (1u64 << du) - 1;
        let in_a = move |k: &VfKey| k.mono & !umask == 0 && (k.target as usize) >= du;
        // Number of u's plus ∂v's, minus one.
        let weight = Weight::new(du as i32, move |k: &VfKey| {
            odd::count(k.mono & umask) + i32::from((k.target as usize) >= du) - 1
        });
        let vdata = VData::new(vf.clone(), in_a, q_u.add(&q_v)).with_weight(weight);
        Ok(MorphismSetup { u, v, q_u, q_v, vf, vdata })
    }

    pub fn dim_u(&self) -> usize {
        self.u.dim()
    }

    pub fn dim_v(&self) -> usize {
        self.v.dim()
    }

    pub fn vector_fields(&self) -> &VectorFields {
        &self.vf
    }

    pub fn vdata(&self) -> &VData<VectorFields> {
        &self.vdata
    }

    /// `(L, a, P, 0)` on the same carrier.
    pub fn zero_delta_vdata(&self) -> VData<VectorFields> {
        self.vdata.with_delta(Field::zero())
    }

    fn umask(&self) -> Mask {
        (1u64 << self.dim_u()) - 1
    }

    fn vmask(&self) -> Mask {
        ((1u64 << (self.dim_u() + self.dim_v())) - 1) & !self.umask()
    }

    pub fn is_u_field(&self, k: &VfKey) -> bool {
        k.mono & !self.umask() == 0 && (k.target as usize) < self.dim_u()
    }

    pub fn is_v_field(&self, k: &VfKey) -> bool {
        k.mono & self.umask() == 0 && (k.target as usize) >= self.dim_u()
    }

    /// Keys of `L' = χ(U[1]) ⊕ χ(V[1])`.
    pub fn in_l_prime(&self, k: &VfKey) -> bool {
        self.is_u_field(k) || self.is_v_field(k)
    }

    pub fn encode_u(&self, p: &LiePresentation) -> Result<Field> {
        if p.dim() != self.dim_u() {
            return Err(Error::SizeMismatch("presentation has the wrong dimension for U".into()));
        }
        Ok(encode_constants(p.table(), 0))
    }

    pub fn encode_v(&self, p: &LiePresentation) -> Result<Field> {
        if p.dim() != self.dim_v() {
            return Err(Error::SizeMismatch("presentation has the wrong dimension for V".into()));
        }
        Ok(encode_constants(p.table(), self.dim_u()))
    }

    /// `a` is `dim V × dim U`.
    pub fn encode_map(&self, a: &Matrix) -> Result<Field> {
        check_shape(a, self.dim_v(), self.dim_u())?;
        Ok(encode_linear_map(a, 0, self.dim_u()))
    }

    pub fn decode_map(&self, phi: &Field) -> Result<Matrix> {
        let (du, dv) = (self.dim_u(), self.dim_v());
        let mut a = vec![vec![q(0); du]; dv];
        for (k, c) in phi.iter() {
            let idx = odd::indices(k.mono);
            let t = k.target as usize;
            if idx.len() != 1 || idx[0] >= du || t < du {
                return Err(Error::Input(format!("{k:?} is not part of a linear map U → V")));
            }
            a[t - du][idx[0]] = -c.clone();
        }
        Ok(a)
    }

    pub fn iota_u(&self, x: &[Rational]) -> Field {
        iota(x, 0)
    }

    pub fn iota_v(&self, x: &[Rational]) -> Field {
        iota(x, self.dim_u())
    }

    /// `[Q_U, Φ] + ½[[Q_V, Φ], Φ]`.
    pub fn morphism_residual(&self, phi: &Field) -> Result<Field> {
        let vf = self.vf.as_ref();
        let first = bracket(vf, &self.q_u, phi)?;
        let second = bracket(vf, &bracket(vf, &self.q_v, phi)?, phi)?;
        Ok(first.add(&second.scale_q(&(q(1) / q(2)))))
    }

    /// `φ[e_i, e_j]_U - [φe_i, φe_j]_V` for all `i < j`.
    pub fn bracket_defect(&self, a: &Matrix) -> Result<Vec<((usize, usize), Vec<Rational>)>> {
        check_shape(a, self.dim_v(), self.dim_u())?;
        let du = self.dim_u();
        let mut out = Vec::new();
        for i in 0..du {
            for j in i + 1..du {
                let (x, y) = (self.u.basis_vector(i), self.u.basis_vector(j));
                let lhs = mat_vec(a, &self.u.bracket(&x, &y));
                let rhs = self.v.bracket(&mat_vec(a, &x), &mat_vec(a, &y));
                let d: Vec<Rational> = lhs.into_iter().zip(rhs).map(|(l, r)| l - r).collect();
                out.push(((i, j), d));
            }
        }
        Ok(out)
    }

    pub fn is_morphism_direct(&self, a: &Matrix) -> Result<bool> {
        Ok(self.bracket_defect(a)?.iter().all(|(_, d)| d.iter().all(Coeff::is_zero)))
    }

    pub fn is_morphism_mc(&self, a: &Matrix) -> Result<bool> {
        Ok(mc_residual(&DerivedAlgebra::new(&self.vdata), &self.encode_map(a)?)?.is_zero())
    }

    /// The V-data with projection twisted by the morphism `a`.
    pub fn twisted(&self, a: &Matrix) -> Result<VData<VectorFields>> {
        self.vdata.twist(&self.encode_map(a)?)
    }

    pub fn nr_algebra(&self, a: &Matrix) -> Result<NrAlgebra<'_>> {
        let phi = self.encode_map(a)?;
        if !self.morphism_residual(&phi)?.is_zero() {
            return Err(Error::NotMaurerCartan);
        }
        let head = self.q_u.add(&bracket(self.vf.as_ref(), &self.q_v, &phi)?);
        Ok(NrAlgebra { setup: self, head })
    }

    pub fn simultaneous(&self, a: &Matrix) -> Result<SimultaneousAlgebra<'_>> {
        let phi = self.encode_map(a)?;
        if !self.morphism_residual(&phi)?.is_zero() {
            return Err(Error::NotMaurerCartan);
        }
        Ok(SimultaneousAlgebra { setup: self, phi })
    }

    /// Keys of `a` in one degree.
    pub fn a_basis(&self, degree: i32) -> Vec<VfKey> {
        self.vdata.abelian_basis(degree)
    }

    /// Keys of `L'` in one degree.
    pub fn l_prime_basis(&self, degree: i32) -> Vec<VfKey> {
        self.vf.basis(degree).into_iter().filter(|k| self.in_l_prime(k)).collect()
    }

    fn v_count(&self, k: &VfKey) -> usize {
        odd::count(k.mono & self.vmask()) as usize
    }
}

/// The twisted derived brackets on `a` written out: `d = [Q_U + [Q_V, Φ], ·]`,
/// `{a, b} = [[Q_V, a], b]`, nothing above arity two.
pub struct NrAlgebra<'a> {
    setup: &'a MorphismSetup,
    head: Field,
}

impl<'a, S: Coeff> LInfinity<S> for NrAlgebra<'a> {
    type Elem = Field<S>;
    type Coord = VfKey;

    fn zero(&self) -> Field<S> {
        Field::zero()
    }
    fn add(&self, a: &Field<S>, b: &Field<S>) -> Field<S> {
        a.add(b)
    }
    fn scale(&self, a: &Field<S>, c: &S) -> Field<S> {
        a.scale(c)
    }
    fn is_zero(&self, a: &Field<S>) -> bool {
        a.is_zero()
    }
    fn components(&self, a: &Field<S>) -> Vec<(i32, Field<S>)> {
        split_by_degree(self.setup.vector_fields(), a).into_iter().collect()
    }
    fn coordinates(&self, a: &Field<S>) -> Vec<(VfKey, S)> {
        a.iter().map(|(k, c)| (*k, c.clone())).collect()
    }
    fn curvature(&self) -> Result<Field<S>> {
        Ok(Field::zero())
    }
    fn bracket(&self, args: &[Field<S>]) -> Result<Field<S>> {
        let vf = self.setup.vector_fields();
        for a in args {
            if !self.setup.vdata().is_in_abelian(a) {
                return Err(Error::NotInAbelian(format!("{a:?}")));
            }
        }
        match args {
            [a] => bracket(vf, &self.head.lift(), a),
            [a, b] => bracket(vf, &bracket(vf, &self.setup.q_v.lift(), a)?, b),
            _ => Ok(Field::zero()),
        }
    }
    fn series_bound(&self, fixed: &[Field<S>], _phi: &Field<S>) -> Result<usize> {
        Ok(2usize.saturating_sub(fixed.len()))
    }
}

/// The twisted algebra on `L'[1] ⊕ a` with `L' = χ(U[1]) ⊕ χ(V[1])`, with every bracket
/// written out by type of argument.
pub struct SimultaneousAlgebra<'a> {
    setup: &'a MorphismSetup,
    phi: Field,
}

#[derive(Clone)]
enum Typed<S> {
    U(i32, Field<S>),
    V(i32, Field<S>),
    A(i32, Field<S>),
}

impl<S: Coeff> Typed<S> {
    fn degree(&self) -> i32 {
        match self {
            Typed::U(d, _) | Typed::V(d, _) => d - 1,
            Typed::A(d, _) => *d,
        }
    }
    fn field(&self) -> &Field<S> {
        match self {
            Typed::U(_, f) | Typed::V(_, f) | Typed::A(_, f) => f,
        }
    }
    fn is_l(&self) -> bool {
        !matches!(self, Typed::A(..))
    }
}

/// Cubic Maurer-Cartan system: the two structure equations and the morphism equation.
#[derive(Clone, Debug, PartialEq)]
pub struct MclaResidual<S: Coeff = Rational> {
    pub u: Field<S>,
    pub v: Field<S>,
    pub morphism: Field<S>,
}

impl<S: Coeff> MclaResidual<S> {
    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero() && self.morphism.is_zero()
    }
}

impl<'a> SimultaneousAlgebra<'a> {
    pub fn setup(&self) -> &MorphismSetup {
        self.setup
    }

    pub fn phi(&self) -> &Field {
        &self.phi
    }

    /// `P_Φ` on a key: a key with `j` v's and target in `V` needs exactly `j` brackets with
    /// `Φ` to reach `a`, one more when the target is in `U`.
    pub fn p_phi<S: Coeff>(&self, x: &Field<S>) -> Result<Field<S>> {
        let vf = self.setup.vector_fields();
        let phi: Field<S> = self.phi.lift();
        let mut out = Field::zero();
        for (k, c) in x.iter() {
            let j = self.setup.v_count(k) + usize::from((k.target as usize) < self.setup.dim_u());
            let mut t: Field<S> = Field::term(*k, c.clone());
            for _ in 0..j {
                t = bracket(vf, &t, &phi)?;
            }
            out = out.add(&self.setup.vdata().untwisted_project(&t).scale_q(&(q(1) / factorial(j))));
        }
        Ok(out)
    }

    fn typed<S: Coeff>(&self, x: &BigElem<VfKey, S>) -> Result<Vec<Typed<S>>> {
        let vf = self.setup.vector_fields();
        let mut out = Vec::new();
        let u = x.l.filter(|k| self.setup.is_u_field(k));
        let v = x.l.filter(|k| self.setup.is_v_field(k));
        if u.len() + v.len() != x.l.len() {
            return Err(Error::Input("L[1]-part outside χ(U[1]) ⊕ χ(V[1])".into()));
        }
        if !self.setup.vdata().is_in_abelian(&x.a) {
            return Err(Error::NotInAbelian(format!("{:?}", x.a)));
        }
        out.extend(split_by_degree(vf, &u).into_iter().map(|(d, f)| Typed::U(d, f)));
        out.extend(split_by_degree(vf, &v).into_iter().map(|(d, f)| Typed::V(d, f)));
        out.extend(split_by_degree(vf, &x.a).into_iter().map(|(d, f)| Typed::A(d, f)));
        Ok(out)
    }

    fn bracket_typed<S: Coeff>(&self, args: &[Typed<S>]) -> Result<BigElem<VfKey, S>> {
        let vf = self.setup.vector_fields();
        let phi: Field<S> = self.phi.lift();
        let q_u: Field<S> = self.setup.q_u.lift();
        let q_v: Field<S> = self.setup.q_v.lift();
        let zero = BigElem::default();
        let l_pos: Vec<usize> = (0..args.len()).filter(|&i| args[i].is_l()).collect();
        match (args.len(), l_pos.len()) {
            (1, 0) => {
                let head = q_u.add(&bracket(vf, &q_v, &phi)?);
                Ok(BigElem::from_a(bracket(vf, &head, args[0].field())?))
            }
            (1, 1) => match &args[0] {
                Typed::U(_, x) => Ok(BigElem::new(bracket(vf, &q_u, x)?.neg(), bracket(vf, x, &phi)?)),
                Typed::V(d, x) => {
                    let k = (*d + 1) as usize;
                    let mut t = x.clone();
                    for _ in 0..k {
                        t = bracket(vf, &t, &phi)?;
                    }
                    Ok(BigElem::new(bracket(vf, &q_v, x)?.neg(), t.scale_q(&(q(1) / factorial(k)))))
                }
                Typed::A(..) => unreachable!(),
            },
            (2, 0) => Ok(BigElem::from_a(bracket(vf, &bracket(vf, &q_v, args[0].field())?, args[1].field())?)),
            (2, 2) => {
                let d = args[0].degree() + 1;
                let v = bracket(vf, args[0].field(), args[1].field())?;
                Ok(BigElem::from_l(if d.rem_euclid(2) == 1 { v.neg() } else { v }))
            }
            (n, 1) => {
                let i = l_pos[0];
                let before: i32 = args[..i].iter().map(|p| p.degree()).sum();
                let sign = if (args[i].degree() * before).rem_euclid(2) == 1 { -1 } else { 1 };
                let rest: Vec<Field<S>> =
                    args.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p.field().clone()).collect();
                let v = match &args[i] {
                    Typed::U(_, x) if n == 2 => bracket(vf, x, &rest[0])?,
                    Typed::U(..) => Field::zero(),
                    Typed::V(..) if n > self.setup.dim_v() + 1 => Field::zero(),
                    Typed::V(_, x) => self.p_phi(&nested_bracket(vf, x, &rest)?)?,
                    Typed::A(..) => unreachable!(),
                };
                Ok(BigElem::from_a(if sign < 0 { v.neg() } else { v }))
            }
            _ => Ok(zero),
        }
    }

    /// The three Maurer-Cartan equations for `(Q̃_U + Q̃_V)[1] + Φ̃`, each written out.
    pub fn mcla_residual<S: Coeff>(&self, qt_u: &Field<S>, qt_v: &Field<S>, phit: &Field<S>) -> Result<MclaResidual<S>> {
        let vf = self.setup.vector_fields();
        let half = q(1) / q(2);
        let phi: Field<S> = self.phi.lift();
        let q_u: Field<S> = self.setup.q_u.lift();
        let q_v: Field<S> = self.setup.q_v.lift();
        let br = |a: &Field<S>, b: &Field<S>| bracket(vf, a, b);
        let u = br(&q_u, qt_u)?.add(&br(qt_u, qt_u)?.scale_q(&half));
        let v = br(&q_v, qt_v)?.add(&br(qt_v, qt_v)?.scale_q(&half));
        let qv_phi = br(qt_v, &phi)?;
        let qv_phit = br(qt_v, phit)?;
        let mut m = br(qt_u, &phi)?;
        m = m.add(&br(&qv_phi, &phi)?.scale_q(&half));
        m = m.add(&br(&q_u.add(&br(&q_v, &phi)?), phit)?);
        m = m.add(&br(qt_u, phit)?);
        m = m.add(&br(&qv_phit, &phi)?);
        m = m.add(&br(&br(&q_v, phit)?, phit)?.scale_q(&half));
        m = m.add(&br(&qv_phit, phit)?.scale_q(&half));
        Ok(MclaResidual { u, v, morphism: m })
    }
}

impl<'a, S: Coeff> LInfinity<S> for SimultaneousAlgebra<'a> {
    type Elem = BigElem<VfKey, S>;
    type Coord = (bool, VfKey);

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
        let vf = self.setup.vector_fields();
        let mut by: std::collections::BTreeMap<i32, Self::Elem> = Default::default();
        for (d, f) in split_by_degree(vf, &x.l) {
            by.entry(d - 1).or_default().l = f;
        }
        for (d, f) in split_by_degree(vf, &x.a) {
            by.entry(d).or_default().a = f;
        }
        by.into_iter().collect()
    }
    fn coordinates(&self, x: &Self::Elem) -> Vec<((bool, VfKey), S)> {
        let mut out: Vec<_> = x.l.iter().map(|(k, c)| ((false, *k), c.clone())).collect();
        out.extend(x.a.iter().map(|(k, c)| ((true, *k), c.clone())));
        out
    }
    fn curvature(&self) -> Result<Self::Elem> {
        Ok(BigElem::default())
    }
    fn bracket(&self, args: &[Self::Elem]) -> Result<Self::Elem> {
        let typed: Vec<Vec<Typed<S>>> = args.iter().map(|x| self.typed(x)).collect::<Result<_>>()?;
        if typed.iter().any(|t| t.is_empty()) {
            return Ok(BigElem::default());
        }
        let mut total = BigElem::default();
        let mut choice = vec![0usize; args.len()];
        loop {
            let picked: Vec<Typed<S>> = choice.iter().enumerate().map(|(i, &c)| typed[i][c].clone()).collect();
            let v = self.bracket_typed(&picked)?;
            total = LInfinity::<S>::add(self, &total, &v);
            let mut i = 0;
            loop {
                if i == choice.len() {
                    return Ok(total);
                }
                choice[i] += 1;
                if choice[i] < typed[i].len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }
    fn series_bound(&self, fixed: &[Self::Elem], _phi: &Self::Elem) -> Result<usize> {
        Ok((self.setup.dim_v() + 1).saturating_sub(fixed.len()))
    }
}

/// A pair of Lie algebras with a linear map between them.
#[derive(Clone, Debug, PartialEq)]
pub struct MorphismTriple {
    pub u: LiePresentation,
    pub v: LiePresentation,
    /// `dim V × dim U`.
    pub phi: Matrix,
}

impl MorphismTriple {
    /// Both Jacobi identities and the morphism condition.
    pub fn is_mc(&self) -> Result<bool> {
        if self.u.jacobi_witness().is_some() || self.v.jacobi_witness().is_some() {
            return Ok(false);
        }
        MorphismSetup::new(self.u.clone(), self.v.clone())?.is_morphism_direct(&self.phi)
    }

    /// The element `(m_U + m_V)[1] + m_a` of the `Δ = 0` algebra on `setup`'s carrier.
    pub fn encode(&self, setup: &MorphismSetup) -> Result<BigElem<VfKey, Rational>> {
        Ok(BigElem::new(setup.encode_u(&self.u)?.add(&setup.encode_v(&self.v)?), setup.encode_map(&self.phi)?))
    }
}

/// `(g, h) · (μ_U, μ_V, φ) = (g^*μ_U, h^*μ_V, h φ g^{-1})`.
pub fn gl_action(g: &Matrix, h: &Matrix, m: &MorphismTriple) -> Result<MorphismTriple> {
    check_shape(g, m.u.dim(), m.u.dim())?;
    check_shape(h, m.v.dim(), m.v.dim())?;
    if !m.is_mc()? {
        return Err(Error::NotMaurerCartan);
    }
    let ginv = inverse(g)?;
    inverse(h)?;
    let out = MorphismTriple { u: m.u.pushforward(g)?, v: m.v.pushforward(h)?, phi: mat_mul(&mat_mul(h, &m.phi)?, &ginv)? };
    debug_assert!(out.is_mc().unwrap_or(false));
    Ok(out)
}

/// [`gl_action`] over an arbitrary coefficient ring, with inverses supplied, as encoded fields.
pub fn gl_action_encoded<S: Coeff>(
    setup: &MorphismSetup,
    m: &MorphismTriple,
    g: &Matrix<S>,
    ginv: &Matrix<S>,
    h: &Matrix<S>,
    hinv: &Matrix<S>,
) -> Result<BigElem<VfKey, S>> {
    let cu: Vec<Vec<Vec<S>>> = m.u.table().iter().map(|x| lift_matrix(x)).collect();
    let cv: Vec<Vec<Vec<S>>> = m.v.table().iter().map(|x| lift_matrix(x)).collect();
    let phi = mat_mul(&mat_mul(h, &lift_matrix(&m.phi))?, ginv)?;
    let l = encode_constants(&pushforward_constants(&cu, g, ginv), 0)
        .add(&encode_constants(&pushforward_constants(&cv, h, hinv), setup.dim_u()));
    Ok(BigElem::new(l, encode_linear_map(&phi, 0, setup.dim_u())))
}

/// The linear field `Z_A = -Σ A_{kl} x_l ∂_k` on one block, so that `[Z_A, ι_X] = ι_{AX}`.
pub fn linear_field<S: Coeff>(a: &Matrix<S>, offset: usize) -> Field<S> {
    encode_linear_map(a, offset, offset)
}

/// The gauge field of the `Δ = 0` algebra at `m`, written out for this case:
/// `[z_U, m_U] + [z_V, m_V]` in `L'[1]` and `[z_U + z_V, m_a] + [[m_V, z_a], m_a]` in `a`.
pub fn gauge_field_la<S: Coeff>(
    setup: &MorphismSetup,
    z: &BigElem<VfKey, S>,
    m: &BigElem<VfKey, S>,
) -> Result<BigElem<VfKey, S>> {
    let vf = setup.vector_fields();
    let split = |x: &Field<S>| (x.filter(|k| setup.is_u_field(k)), x.filter(|k| setup.is_v_field(k)));
    let (zu, zv) = split(&z.l);
    let (mu, mv) = split(&m.l);
    let l = bracket(vf, &zu, &mu)?.add(&bracket(vf, &zv, &mv)?);
    let a = bracket(vf, &zu.add(&zv), &m.a)?.add(&bracket(vf, &bracket(vf, &mv, &z.a)?, &m.a)?);
    Ok(BigElem::new(l, a))
}

/// Splitting `g = U ⊕ V`, with everything expressed in an adapted basis (U first).
#[derive(Clone)]
pub struct SubalgebraSetup {
    /// Constants of `g` in the adapted basis.
    pub g: LiePresentation,
    pub dim_u: usize,
    /// Columns: the adapted basis in the original coordinates.
    pub basis: Matrix,
    pub q_g: Field,
    vf: Arc<VectorFields>,
    vdata: VData<VectorFields>,
}

/// The (possibly curved) V-data whose Maurer-Cartan elements are linear maps `U → V`
/// with graph a subalgebra.
pub fn subalgebra_vdata(g: &LiePresentation, u_basis: &[Vec<Rational>], v_basis: &[Vec<Rational>]) -> Result<SubalgebraSetup> {
    let n = g.dim();
    if u_basis.len() + v_basis.len() != n || u_basis.iter().chain(v_basis).any(|b| b.len() != n) {
        return Err(Error::SizeMismatch("the two bases must together have dim g vectors of length dim g".into()));
    }
    let basis: Matrix = (0..n).map(|r| u_basis.iter().chain(v_basis).map(|b| b[r].clone()).collect()).collect();
    let adapted = g.change_basis(&basis).map_err(|e| match e {
        Error::SingularMatrix => Error::Input("U and V are not complementary".into()),
        e => e,
    })?;
    let du = u_basis.len();
    let vf = Arc::new(VectorFields::new(n)?);
    let q_g = encode_constants(adapted.table(), 0);
    let umask: Mask = (1u64 << du) - 1;
    let in_a = move |k: &VfKey| k.mono & !umask == 0 && (k.target as usize) >= du;
    let weight =
        Weight::new(du as i32, move |k: &VfKey| odd::count(k.mono & umask) + i32::from((k.target as usize) >= du) - 1);
    let vdata = VData::new(vf.clone(), in_a, q_g.clone()).with_weight(weight);
    Ok(SubalgebraSetup { g: adapted, dim_u: du, basis, q_g, vf, vdata })
}

impl SubalgebraSetup {
    pub fn vdata(&self) -> &VData<VectorFields> {
        &self.vdata
    }

    pub fn vector_fields(&self) -> &VectorFields {
        &self.vf
    }

    pub fn dim_v(&self) -> usize {
        self.g.dim() - self.dim_u
    }

    /// `a` is `dim V × dim U` in the adapted basis.
    pub fn encode_map(&self, a: &Matrix) -> Result<Field> {
        check_shape(a, self.dim_v(), self.dim_u)?;
        Ok(encode_linear_map(a, 0, self.dim_u))
    }

    pub fn graph_is_subalgebra(&self, a: &Matrix) -> Result<bool> {
        Ok(mc_residual(&DerivedAlgebra::new(&self.vdata), &self.encode_map(a)?)?.is_zero())
    }

    /// Direct test: `[X + φX, Y + φY]` lies in the graph for all basis `X, Y` of `U`.
    pub fn graph_closure_oracle(&self, a: &Matrix) -> Result<bool> {
        check_shape(a, self.dim_v(), self.dim_u)?;
        let (n, du) = (self.g.dim(), self.dim_u);
        let lift = |i: usize| -> Vec<Rational> {
            let mut x = vec![q(0); n];
            x[i] = q(1);
            for (eta, row) in a.iter().enumerate() {
                x[du + eta] = row[i].clone();
            }
            x
        };
        for i in 0..du {
            for j in i + 1..du {
                let w = self.g.bracket(&lift(i), &lift(j));
                let wu = &w[..du];
                let expected = mat_vec(a, wu);
                if w[du..] != expected[..] {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// When `U` is a subalgebra: the morphism setup for the inclusion `U → g` and the
    /// inclusion matrix. Its Maurer-Cartan elements deform the map, not the subspace.
    pub fn inclusion_setup(&self) -> Result<(MorphismSetup, Matrix)> {
        if !self.vdata.is_flat()? {
            return Err(Error::InvalidVData("U is not a subalgebra".into()));
        }
        let du = self.dim_u;
        let mut entries = Vec::new();
        for i in 0..du {
            for j in i + 1..du {
                for k in 0..du {
                    entries.push((i, j, k, self.g.constant(i, j, k).clone()));
                }
            }
        }
        let u = LiePresentation::from_entries(du, &entries)?;
        let n = self.g.dim();
        let incl: Matrix = (0..n).map(|r| (0..du).map(|c| if r == c { q(1) } else { q(0) }).collect()).collect();
        Ok((MorphismSetup::new(u, self.g.clone())?, incl))
    }
}

/// All matrices of the given shape with entries in `values`.
pub fn all_matrices(rows: usize, cols: usize, values: &[Rational]) -> Vec<Matrix> {
    let total = rows * cols;
    let mut out = Vec::new();
    let mut idx = vec![0usize; total];
    loop {
        out.push((0..rows).map(|r| (0..cols).map(|c| values[idx[r * cols + c]].clone()).collect()).collect());
        let mut i = 0;
        loop {
            if i == total {
                return out;
            }
            idx[i] += 1;
            if idx[i] < values.len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

pub fn identity_matrix(n: usize) -> Matrix {
    identity(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vdata::big::BigAlgebra;
    use crate::vdata::{gauge_field, linf_relation_residual, mc_residual};

    fn aff_setup() -> MorphismSetup {
        MorphismSetup::new(LiePresentation::aff2(), LiePresentation::aff2()).unwrap()
    }

    #[test]
    fn aff2_field_and_jacobi() {
        let q_field = encode_lie(&LiePresentation::aff2());
        let vf = VectorFields::new(2).unwrap();
        assert_eq!(q_field, vf.field(&[0, 1], 0, q(-1)));
        assert_eq!(jacobi(&LiePresentation::aff2()).unwrap(), JacobiReport { homological: true, witness: None });
        assert_eq!(encode_lie(&LiePresentation::abelian(3)), Field::zero());
    }

    #[test]
    fn jacobi_oracles_agree() {
        // [e0,e1] = e2, [e0,e2] = e1 is a semidirect product, so Jacobi holds.
        let p = LiePresentation::from_entries(3, &[(0, 1, 2, q(1)), (0, 2, 1, q(1))]).unwrap();
        assert_eq!(jacobi(&p).unwrap(), JacobiReport { homological: true, witness: None });
        // [e0,e1] = e1, [e1,e2] = e0 fails: the Jacobi sum on (e0,e1,e2) is -e0.
        let p = LiePresentation::from_entries(3, &[(0, 1, 1, q(1)), (1, 2, 0, q(1))]).unwrap();
        let r = jacobi(&p).unwrap();
        assert!(!r.homological);
        assert_eq!(r.witness, Some((0, 1, 2)));
    }

    #[test]
    fn encoding_recovers_the_bracket() {
        // [[Q, ι_X], ι_Y] = ι_[X,Y]
        for p in [LiePresentation::aff2(), LiePresentation::sl2()] {
            let vf = VectorFields::new(p.dim()).unwrap();
            let qf = encode_lie(&p);
            for i in 0..p.dim() {
                for j in 0..p.dim() {
                    let (x, y) = (p.basis_vector(i), p.basis_vector(j));
                    let lhs = bracket(&vf, &bracket(&vf, &qf, &iota(&x, 0)).unwrap(), &iota(&y, 0)).unwrap();
                    assert_eq!(lhs, iota(&p.bracket(&x, &y), 0));
                }
            }
            assert_eq!(decode_constants(&qf, 0, p.dim()).unwrap(), p);
        }
    }

    #[test]
    fn map_encoding_recovers_the_map() {
        let s = aff_setup();
        let a = vec![vec![q(1), q(2)], vec![q(-3), q(5)]];
        let phi = s.encode_map(&a).unwrap();
        for l in 0..2 {
            let x = s.u.basis_vector(l);
            let lhs = bracket(s.vector_fields(), &phi, &s.iota_u(&x)).unwrap();
            assert_eq!(lhs, s.iota_v(&mat_vec(&a, &x)));
        }
        assert_eq!(s.decode_map(&phi).unwrap(), a);
    }

    #[test]
    fn residual_transports_the_defect() {
        // [[R, ι_X], ι_Y] = ι_{[φX,φY] - φ[X,Y]} for R the morphism residual.
        let s = aff_setup();
        for a in all_matrices(2, 2, &[q(-1), q(0), q(1)]) {
            let r = s.morphism_residual(&s.encode_map(&a).unwrap()).unwrap();
            for ((i, j), d) in s.bracket_defect(&a).unwrap() {
                let vf = s.vector_fields();
                let lhs = nested_bracket(vf, &r, &[s.iota_u(&s.u.basis_vector(i)), s.iota_u(&s.u.basis_vector(j))]).unwrap();
                let neg: Vec<Rational> = d.into_iter().map(|x| -x).collect();
                assert_eq!(lhs, s.iota_v(&neg));
            }
        }
        let swap = vec![vec![q(0), q(1)], vec![q(1), q(0)]];
        assert!(!s.morphism_residual(&s.encode_map(&swap).unwrap()).unwrap().is_zero());
        assert!(s.morphism_residual(&s.encode_map(&identity(2)).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn morphism_vdata_is_valid_and_filtered() {
        let s = aff_setup();
        let report = crate::vdata::validate_vdata(s.vdata()).unwrap();
        assert!(report.is_valid() && report.is_flat());
        assert!(crate::vdata::check_filtration(s.vdata()).unwrap().passes());
        let zero_weight = s.vdata().clone().with_weight(Weight::new(0, |_| 0));
        let f = crate::vdata::check_filtration(&zero_weight).unwrap();
        assert!(f.abelian_zero_failure.is_some());
    }

    #[test]
    fn derived_brackets_only_unary_and_binary() {
        let s = aff_setup();
        let d = DerivedAlgebra::new(s.vdata());
        let basis: Vec<Field> = (-1..=1).flat_map(|deg| s.a_basis(deg)).map(Field::single).collect();
        for x in &basis {
            for y in &basis {
                for z in &basis {
                    let t: Field = d.bracket(&[x.clone(), y.clone(), z.clone()]).unwrap();
                    assert!(t.is_zero());
                }
            }
            let unary: Field = d.bracket(std::slice::from_ref(x)).unwrap();
            assert_eq!(unary, bracket(s.vector_fields(), &s.q_u, x).unwrap());
        }
    }

    #[test]
    fn nr_brackets_match_twisted_derived_brackets() {
        let s = aff_setup();
        let id = identity(2);
        let nr = s.nr_algebra(&id).unwrap();
        let tw = s.twisted(&id).unwrap();
        let d = DerivedAlgebra::new(&tw);
        let basis: Vec<Field> = (-1..=1).flat_map(|deg| s.a_basis(deg)).map(Field::single).collect();
        for x in &basis {
            let a: Field = nr.bracket(std::slice::from_ref(x)).unwrap();
            let b: Field = d.bracket(std::slice::from_ref(x)).unwrap();
            assert_eq!(a, b);
            let dd: Field = nr.bracket(&[a.clone()]).unwrap();
            assert!(dd.is_zero());
            for y in &basis {
                let a: Field = nr.bracket(&[x.clone(), y.clone()]).unwrap();
                let b: Field = d.bracket(&[x.clone(), y.clone()]).unwrap();
                assert_eq!(a, b);
                for z in &basis {
                    let r = linf_relation_residual::<Rational, _>(&nr, &[x.clone(), y.clone(), z.clone()]).unwrap();
                    assert!(r.is_zero());
                }
            }
        }
        assert!(matches!(s.nr_algebra(&vec![vec![q(0), q(1)], vec![q(1), q(0)]]), Err(Error::NotMaurerCartan)));
    }

    #[test]
    fn nr_binary_matches_wedge_with_bracket() {
        // [[{A, B}, ι_X], ι_Y] = [AX, BY]_V + [BX, AY]_V.
        let s = aff_setup();
        let nr = s.nr_algebra(&identity(2)).unwrap();
        let vf = s.vector_fields();
        for a in all_matrices(2, 2, &[q(0), q(1)]) {
            for b in all_matrices(2, 2, &[q(0), q(-1), q(2)]) {
                let (fa, fb) = (s.encode_map(&a).unwrap(), s.encode_map(&b).unwrap());
                let br: Field = nr.bracket(&[fa, fb]).unwrap();
                for i in 0..2 {
                    for j in 0..2 {
                        let (x, y) = (s.u.basis_vector(i), s.u.basis_vector(j));
                        let lhs = nested_bracket(vf, &br, &[s.iota_u(&x), s.iota_u(&y)]).unwrap();
                        let t1 = s.v.bracket(&mat_vec(&a, &x), &mat_vec(&b, &y));
                        let t2 = s.v.bracket(&mat_vec(&b, &x), &mat_vec(&a, &y));
                        let expected: Vec<Rational> = t1.into_iter().zip(t2).map(|(p, r)| p + r).collect();
                        assert_eq!(lhs, s.iota_v(&expected));
                    }
                }
            }
        }
    }

    fn sample_big_inputs(s: &MorphismSetup) -> Vec<BigElem<VfKey, Rational>> {
        let mut out = Vec::new();
        for deg in -1..=2 {
            for k in s.l_prime_basis(deg) {
                out.push(BigElem::from_l(Field::single(k)));
            }
            for k in s.a_basis(deg) {
                out.push(BigElem::from_a(Field::single(k)));
            }
        }
        out
    }

    #[test]
    fn explicit_simultaneous_brackets_match_generic() {
        let s = aff_setup();
        let id = identity(2);
        let sim = s.simultaneous(&id).unwrap();
        let tw = s.twisted(&id).unwrap();
        let big = BigAlgebra::new(&tw).unwrap();
        let inputs = sample_big_inputs(&s);
        for x in &inputs {
            let a: BigElem<VfKey, Rational> = sim.bracket(std::slice::from_ref(x)).unwrap();
            let b: BigElem<VfKey, Rational> = big.bracket(std::slice::from_ref(x)).unwrap();
            assert_eq!(a, b, "unary on {x:?}");
            for y in inputs.iter().step_by(3) {
                let a: BigElem<VfKey, Rational> = sim.bracket(&[x.clone(), y.clone()]).unwrap();
                let b: BigElem<VfKey, Rational> = big.bracket(&[x.clone(), y.clone()]).unwrap();
                assert_eq!(a, b, "binary on {x:?}, {y:?}");
            }
        }
    }

    #[test]
    fn spec_unary_on_u_fields() {
        // d(Q̃_U[1]) = -[Q_U, Q̃_U][1] + [Q̃_U, Φ]
        let s = aff_setup();
        let sim = s.simultaneous(&identity(2)).unwrap();
        let vf = s.vector_fields();
        for k in s.l_prime_basis(1).into_iter().filter(|k| s.is_u_field(k)) {
            let x = Field::single(k);
            let r: BigElem<VfKey, Rational> = sim.bracket(&[BigElem::from_l(x.clone())]).unwrap();
            assert_eq!(r.l, bracket(vf, &s.q_u, &x).unwrap().neg());
            assert_eq!(r.a, bracket(vf, &x, sim.phi()).unwrap());
        }
    }

    #[test]
    fn mc_pieces_split_into_structure_and_morphism_equations() {
        let s = aff_setup();
        let sim = s.simultaneous(&identity(2)).unwrap();
        let tw = s.twisted(&identity(2)).unwrap();
        let big = BigAlgebra::new(&tw).unwrap();
        let samples = [
            (LiePresentation::from_entries(2, &[(0, 1, 1, q(1))]).unwrap(), LiePresentation::abelian(2), vec![vec![q(1), q(0)], vec![q(0), q(0)]]),
            (LiePresentation::from_entries(2, &[(0, 1, 0, q(-1))]).unwrap(), LiePresentation::from_entries(2, &[(0, 1, 0, q(-1))]).unwrap(), vec![vec![q(-1), q(0)], vec![q(0), q(-1)]]),
        ];
        for (pu, pv, phit) in samples {
            let qtu = s.encode_u(&pu).unwrap();
            let qtv = s.encode_v(&pv).unwrap();
            let ft = s.encode_map(&phit).unwrap();
            let r = sim.mcla_residual(&qtu, &qtv, &ft).unwrap();
            let g = mc_residual(&big, &BigElem::new(qtu.add(&qtv), ft.clone())).unwrap();
            assert_eq!(g.l, r.u.add(&r.v).neg());
            assert_eq!(g.a, r.morphism);
            let e = mc_residual(&sim, &BigElem::new(qtu.add(&qtv), ft)).unwrap();
            assert_eq!(e, g);
        }
    }

    #[test]
    fn deformation_to_abelian_with_zero_map() {
        // Q̃ = -Q on both sides and φ̃ = -φ: the zero map between abelian algebras.
        let s = aff_setup();
        let sim = s.simultaneous(&identity(2)).unwrap();
        let minus_id: Matrix = identity::<Rational>(2).iter().map(|r| r.iter().map(|x| -x.clone()).collect()).collect();
        let r = sim.mcla_residual(&s.q_u.neg(), &s.q_v.neg(), &s.encode_map(&minus_id).unwrap()).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn four_ary_brackets_vanish_in_dimension_two() {
        let s = aff_setup();
        let tw = s.twisted(&identity(2)).unwrap();
        let big = BigAlgebra::new(&tw).unwrap();
        let heads: Vec<_> = (0..=2).flat_map(|d| s.l_prime_basis(d)).filter(|k| s.is_v_field(k)).collect();
        let avals: Vec<Field> = (-1..=1).flat_map(|d| s.a_basis(d)).map(Field::single).collect();
        let mut three_nonzero = false;
        for h in &heads {
            for a1 in &avals {
                for a2 in avals.iter().step_by(2) {
                    let base = vec![BigElem::from_l(Field::single(*h)), BigElem::from_a(a1.clone()), BigElem::from_a(a2.clone())];
                    let t: BigElem<VfKey, Rational> = big.bracket(&base).unwrap();
                    three_nonzero |= !t.a.is_zero();
                    for a3 in avals.iter().step_by(3) {
                        let mut args = base.clone();
                        args.push(BigElem::from_a(a3.clone()));
                        let r: BigElem<VfKey, Rational> = big.bracket(&args).unwrap();
                        assert!(r.l.is_zero() && r.a.is_zero());
                    }
                }
            }
        }
        assert!(three_nonzero);
    }

    #[test]
    fn subalgebras_of_sl2() {
        let g = LiePresentation::sl2();
        let e = |i: usize| g.basis_vector(i);
        let borel = subalgebra_vdata(&g, &[e(0), e(1)], &[e(2)]).unwrap();
        assert!(borel.vdata().is_flat().unwrap());
        assert!(borel.graph_is_subalgebra(&vec![vec![q(0), q(0)]]).unwrap());
        let bad = subalgebra_vdata(&g, &[e(1), e(2)], &[e(0)]).unwrap();
        assert!(!bad.vdata().is_flat().unwrap());
        assert!(!bad.graph_is_subalgebra(&vec![vec![q(0), q(0)]]).unwrap());
        assert!(!bad.graph_closure_oracle(&vec![vec![q(0), q(0)]]).unwrap());
        for s in [&borel, &bad] {
            for a in all_matrices(1, 2, &[q(-1), q(0), q(1), q(2)]) {
                assert_eq!(s.graph_is_subalgebra(&a).unwrap(), s.graph_closure_oracle(&a).unwrap(), "{a:?}");
            }
        }
        assert!(subalgebra_vdata(&g, &[e(0), e(0)], &[e(2)]).is_err());
    }

    #[test]
    fn curved_twist_kills_the_curvature() {
        // U = span(E, F) with V = span(H): graph of φ(E) = a H, φ(F) = b H closes iff ab = -1/4... found by the oracle.
        let g = LiePresentation::sl2();
        let e = |i: usize| g.basis_vector(i);
        let s = subalgebra_vdata(&g, &[e(1), e(2)], &[e(0)]).unwrap();
        let vals: Vec<Rational> = [-2, -1, 1, 2].iter().flat_map(|&n| [q(n), q(n) / q(2), q(n) / q(4)]).collect();
        let mut found = false;
        for a in all_matrices(1, 2, &vals) {
            if s.graph_closure_oracle(&a).unwrap() {
                found = true;
                let phi = s.encode_map(&a).unwrap();
                let tw = s.vdata().twist(&phi).unwrap();
                assert!(tw.project(&s.q_g).unwrap().is_zero());
            }
        }
        assert!(found);
    }

    #[test]
    fn inclusion_and_subspace_deformations_differ() {
        let g = LiePresentation::sl2();
        let e = |i: usize| g.basis_vector(i);
        let borel = subalgebra_vdata(&g, &[e(0), e(1)], &[e(2)]).unwrap();
        let (ms, incl) = borel.inclusion_setup().unwrap();
        assert!(ms.is_morphism_direct(&incl).unwrap());
        // E ↦ H + E has the same image as the inclusion but is not a morphism.
        let mut scaled = incl.clone();
        scaled[0][1] = q(1);
        assert!(!ms.is_morphism_mc(&scaled).unwrap());
        assert!(ms.is_morphism_mc(&incl).unwrap());
    }

    #[test]
    fn gl_action_preserves_mc_and_identity_is_trivial() {
        let m = MorphismTriple { u: LiePresentation::aff2(), v: LiePresentation::aff2(), phi: identity(2) };
        assert_eq!(gl_action(&identity(2), &identity(2), &m).unwrap(), m);
        let two = vec![vec![q(2), q(0)], vec![q(0), q(2)]];
        let out = gl_action(&two, &identity(2), &m).unwrap();
        assert!(out.is_mc().unwrap());
        assert_eq!(out.u.constant(0, 1, 0), &(q(1) / q(2)));
        assert_eq!(out.phi, vec![vec![q(1) / q(2), q(0)], vec![q(0), q(1) / q(2)]]);
        assert!(matches!(gl_action(&vec![vec![q(1), q(1)], vec![q(1), q(1)]], &identity(2), &m), Err(Error::SingularMatrix)));
    }

    #[test]
    fn gauge_field_matches_written_out_form_and_orbit_tangent() {
        use crate::graded_core::EpsScalar;
        let s = aff_setup();
        let vd0 = s.zero_delta_vdata();
        let big = BigAlgebra::new(&vd0).unwrap();
        let m = MorphismTriple { u: LiePresentation::aff2(), v: LiePresentation::aff2(), phi: identity(2) };
        let me = m.encode(&s).unwrap();
        let zu = vec![vec![q(1), q(2)], vec![q(0), q(-1)]];
        let zv = vec![vec![q(0), q(1)], vec![q(3), q(1)]];
        let z = BigElem::new(linear_field(&zu, 0).add(&linear_field(&zv, 2)), Field::zero());
        let y_generic: BigElem<VfKey, Rational> = gauge_field(&big, &z, &me).unwrap();
        assert_eq!(y_generic, gauge_field_la(&s, &z, &me).unwrap());
        assert_eq!(y_generic, crate::vdata::theorem::gauge_field_kernel(&vd0, &z, &me).unwrap());

        // The curve (e^{εz_U}, e^{εz_V}) · m to first order.
        let eps = |a: &Matrix, sign: i64| -> Matrix<EpsScalar> {
            (0..2)
                .map(|i| (0..2).map(|j| EpsScalar::linear(if i == j { q(1) } else { q(0) }, a[i][j].clone() * q(sign), 1)).collect())
                .collect()
        };
        let curve = gl_action_encoded(&s, &m, &eps(&zu, 1), &eps(&zu, -1), &eps(&zv, 1), &eps(&zv, -1)).unwrap();
        let d1 = |f: &Field<EpsScalar>| f.map_coeffs(|c| c.coeff(1));
        assert_eq!(d1(&curve.l), y_generic.l);
        assert_eq!(d1(&curve.a), y_generic.a);
    }

    #[test]
    fn abelian_part_of_gauge_is_absorbed() {
        let s = aff_setup();
        let vd0 = s.zero_delta_vdata();
        let big = BigAlgebra::new(&vd0).unwrap();
        let m = MorphismTriple { u: LiePresentation::aff2(), v: LiePresentation::aff2(), phi: identity(2) }.encode(&s).unwrap();
        let m_v = m.l.filter(|k| s.is_v_field(k));
        for za in [vec![q(1), q(0)], vec![q(2), q(-3)]] {
            let z_a = s.iota_v(&za);
            let y1: BigElem<VfKey, Rational> = gauge_field(&big, &BigElem::from_a(z_a.clone()), &m).unwrap();
            let zl = bracket(s.vector_fields(), &m_v, &z_a).unwrap();
            let y2: BigElem<VfKey, Rational> = gauge_field(&big, &BigElem::from_l(zl), &m).unwrap();
            assert_eq!(y1, y2);
        }
    }
}
