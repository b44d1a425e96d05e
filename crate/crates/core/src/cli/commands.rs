use super::problem::*;
use super::report::*;
use super::Options;
use crate::assoc_deform::{encode_assoc, encode_product, tensor_coderivations, AssocSetup};
use crate::bialgebra_deform::{bialgebra_vdata, encode_bialgebra};
use crate::error::{Error, Result};
use crate::graded_core::linalg::Matrix;
use crate::graded_core::{q, Coeff, LinComb, Poly, Rational, Vector};
use crate::graded_lie::{CoderAlgebra, Coderivation, Flavor, GradedLie, Overflow, VfKey};
use crate::lie_deform::{jacobi, LiePresentation, MorphismSetup, MorphismTriple, subalgebra_vdata};
use crate::linf_coder::{keyli_recover, mcli_pair_check, squares_to_zero, symmetrize_ainf, theta_from_linf, LinfMorphismSetup};
use crate::vdata::{
    check_filtration, linf_relation_residual, mc_residual, solve_mc_newton, validate_vdata, BigAlgebra, BigElem,
    DerivedAlgebra, DirectLInf, LInfinity, NewtonConfig, NewtonOutcome, VData, Verdict,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::fmt::Debug;

const DEFAULT_ARITY: usize = 3;
const MAX_TUPLES: usize = 200_000;

fn zero_matrix(rows: usize, cols: usize) -> Matrix {
    vec![vec![q(0); cols]; rows]
}

fn unit_matrix(rows: usize, cols: usize, r: usize, c: usize) -> Matrix {
    let mut m = zero_matrix(rows, cols);
    m[r][c] = q(1);
    m
}

fn require<T: Clone>(x: &Option<T>, what: &str) -> Result<T> {
    x.clone().ok_or_else(|| Error::Input(format!("missing \"{what}\"")))
}

fn vdata_checks<G: GradedLie>(r: &mut Report, vd: &VData<G>, require_flat: bool) -> Result<()>
where
    G::Key: Label,
{
    let rep = validate_vdata(vd)?;
    let witness = if let Some(k) = &rep.idempotent_failure {
        json!({"projection": k.label()})
    } else if let Some((x, y)) = &rep.abelian_failure {
        json!({"abelian": [x.label(), y.label()]})
    } else if let Some((x, y)) = &rep.kernel_failure {
        json!({"kernel": [sparse(x), sparse(y)]})
    } else {
        json!({"delta_square_zero": rep.delta_square_zero})
    };
    r.check("vdata-axioms", rep.is_valid(), Some(witness));
    if require_flat {
        r.check("flat", rep.is_flat(), Some(sparse(&rep.curvature)));
    } else {
        r.info("curvature", sparse(&rep.curvature));
    }
    let f = check_filtration(vd)?;
    let fw = json!({
        "bracket": f.bracket_failure.as_ref().map(|(x, y)| vec![x.label(), y.label()]),
        "abelian_degree_zero": f.abelian_zero_failure.as_ref().map(Label::label),
        "projection": f.projection_failure.as_ref().map(Label::label),
    });
    r.check("filtration", f.passes(), Some(fw));
    Ok(())
}

fn jacobi_checks(r: &mut Report, name: &str, p: &LiePresentation) -> Result<()> {
    let j = jacobi(p)?;
    let direct = j.witness.is_none();
    r.check(&format!("jacobi-{name}"), direct, j.witness.map(|(a, b, c)| json!([a, b, c])));
    r.check(&format!("jacobi-{name}-dual-path"), direct == j.homological, None);
    Ok(())
}

fn linf_cutoff(opts: &Options, l: &DirectLInf) -> usize {
    opts.cutoff.unwrap_or_else(|| l.max_arity().max(4))
}

pub fn validate(p: &Problem, opts: &Options) -> Result<Report> {
    let mut r = Report::new("validate", p.kind());
    match p {
        Problem::Lie { lie } => jacobi_checks(&mut r, "g", &lie.build()?)?,
        Problem::LieMorphism { u, v, .. } => {
            let (u, v) = (u.build()?, v.build()?);
            jacobi_checks(&mut r, "u", &u)?;
            jacobi_checks(&mut r, "v", &v)?;
            vdata_checks(&mut r, MorphismSetup::new(u, v)?.vdata(), true)?;
        }
        Problem::Subalgebra { g, u_basis, v_basis, .. } => {
            let g = g.build()?;
            jacobi_checks(&mut r, "g", &g)?;
            let s = subalgebra_vdata(&g, &build_vectors(u_basis), &build_vectors(v_basis))?;
            vdata_checks(&mut r, s.vdata(), false)?;
        }
        Problem::Bialgebra { u, v, .. } => {
            let (u, v) = (u.build()?, v.build()?);
            for (name, b) in [("u", &u), ("v", &v)] {
                let direct = b.is_bialgebra_direct();
                r.check(&format!("bialgebra-{name}"), direct, b.cocycle_witness().map(|(i, j)| json!([i, j])));
                let enc = encode_bialgebra(b)?;
                r.check(&format!("bialgebra-{name}-dual-path"), direct == enc.residual.is_zero(), Some(sparse(&enc.residual)));
            }
            vdata_checks(&mut r, bialgebra_vdata(&u, &v)?.vdata(), true)?;
        }
        Problem::Assoc { algebra } => {
            let a = algebra.build()?;
            let w = a.associativity_witness();
            r.check("associative", w.is_none(), w.map(|(i, j, k)| json!([i, j, k])));
            r.check("associative-dual-path", w.is_none() == encode_assoc(&a)?.associative, None);
        }
        Problem::AssocMorphism { u, v, .. } => {
            let (u, v) = (u.build()?, v.build()?);
            for (name, a) in [("u", &u), ("v", &v)] {
                let w = a.associativity_witness();
                r.check(&format!("associative-{name}"), w.is_none(), w.map(|(i, j, k)| json!([i, j, k])));
            }
            let s = AssocSetup::new(&u, &v, opts.cutoff.unwrap_or(3))?;
            r.info("cutoff", json!(s.cutoff()));
            vdata_checks(&mut r, s.vdata(), true)?;
        }
        Problem::Linf { linf, .. } => {
            let l = linf.build()?;
            let cutoff = linf_cutoff(opts, &l);
            let window = opts.arity.unwrap_or(cutoff);
            let witness = relation_witness(&l, window)?;
            r.check("linf-relations", witness.is_none(), witness.clone());
            let sq = squares_to_zero(&theta_from_linf(&l, cutoff)?)?;
            r.check("coderivation-squares-to-zero", sq, None);
            if window == cutoff {
                r.check("linf-dual-path", sq == witness.is_none(), None);
            }
            r.info("cutoff", json!(cutoff)).info("arity_window", json!(window));
        }
        Problem::LinfMorphism { u, v, phi } => {
            let (lu, lv) = (u.build()?, v.build()?);
            let fam = phi.as_ref().map(|f| build_family(f, lu.space(), lv.space())).transpose()?.unwrap_or_default();
            let cutoff = morphism_cutoff(opts, &lu, &lv, &fam);
            for (name, l) in [("u", &lu), ("v", &lv)] {
                r.check(&format!("linf-{name}"), squares_to_zero(&theta_from_linf(l, cutoff)?)?, None);
            }
            let s = LinfMorphismSetup::new(&lu, &lv, cutoff)?;
            r.info("cutoff", json!(cutoff));
            vdata_checks(&mut r, s.vdata(), true)?;
        }
        Problem::Ainf { algebra, ainf } => {
            let theta = ainf_theta(algebra, ainf, opts)?;
            r.check("ainf-squares-to-zero", squares_to_zero(&theta)?, None);
            if let Some(a) = algebra {
                let w = a.build()?.associativity_witness();
                r.check("associative", w.is_none(), w.map(|(i, j, k)| json!([i, j, k])));
            }
            r.info("cutoff", json!(theta.algebra().cutoff()));
        }
    }
    Ok(r)
}

fn multisets(items: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(items: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items {
            cur.push(i);
            go(items, k, i, cur, out);
            cur.pop();
        }
    }
    go(items, k, 0, &mut cur, &mut out);
    out
}

fn count_multisets(items: usize, k: usize) -> usize {
    // C(items + k - 1, k) with early saturation.
    let mut c: usize = 1;
    for i in 0..k {
        c = c.saturating_mul(items + i) / (i + 1);
    }
    c
}

fn relation_witness(l: &DirectLInf, window: usize) -> Result<Option<Value>> {
    let dim = l.space().dim();
    for n in 1..=window {
        if count_multisets(dim, n) > MAX_TUPLES {
            return Err(Error::Input(format!("arity window {window} is too large for dimension {dim}")));
        }
        for t in multisets(dim, n) {
            let ins: Vec<Vector> = t.iter().map(|&i| Vector::single(i)).collect();
            let res: Vector = linf_relation_residual::<Rational, _>(l, &ins)?;
            if !res.is_zero() {
                return Ok(Some(json!({"inputs": t, "residual": sparse(&res)})));
            }
        }
    }
    Ok(None)
}

fn morphism_cutoff(opts: &Options, u: &DirectLInf, v: &DirectLInf, fam: &[crate::graded_core::MultilinearMap]) -> usize {
    let need = fam.iter().map(|f| f.arity()).chain([u.max_arity(), v.max_arity()]).max().unwrap_or(1);
    opts.cutoff.unwrap_or_else(|| need.max(3))
}

fn ainf_theta(algebra: &Option<AssocSpec>, ainf: &Option<AinfSpec>, opts: &Options) -> Result<Coderivation> {
    let cutoff = opts.cutoff.unwrap_or(3);
    match (algebra, ainf) {
        (Some(a), None) => {
            let a = a.build()?;
            Coderivation::new(tensor_coderivations(a.dim(), cutoff)?, encode_product(&a, 0))
        }
        (None, Some(s)) => {
            let maps = s.build()?;
            let alg = CoderAlgebra::new(Flavor::Tensor, s.space(), 1, cutoff, Overflow::Quotient)?;
            for m in &maps {
                if m.arity() == 0 || m.arity() > cutoff {
                    return Err(Error::CutoffOverflow { arity: m.arity(), cutoff });
                }
            }
            Coderivation::from_taylor(alg, &maps)
        }
        _ => Err(Error::Input("exactly one of \"algebra\" and \"ainf\" is required".into())),
    }
}

pub fn residual(p: &Problem, opts: &Options) -> Result<Report> {
    let mut r = Report::new("residual", p.kind());
    match p {
        Problem::LieMorphism { u, v, map, deformation, .. } => {
            let s = MorphismSetup::new(u.build()?, v.build()?)?;
            let a = build_matrix(&require(map, "map")?, s.dim_v(), s.dim_u())?;
            let phi = s.encode_map(&a)?;
            let mc = s.morphism_residual(&phi)?;
            let defect = s.bracket_defect(&a)?;
            let direct = defect.iter().all(|(_, d)| d.iter().all(Coeff::is_zero));
            r.info("residual", sparse(&mc)).info("direct_defect", defects(&defect));
            r.check("mc-residual-zero", mc.is_zero(), None);
            r.check("dual-path-agree", mc.is_zero() == direct, None);
            if let Some(d) = deformation {
                let du = d.u.as_ref().map(|x| x.build()).transpose()?.unwrap_or_else(|| LiePresentation::abelian(s.dim_u()));
                let dv = d.v.as_ref().map(|x| x.build()).transpose()?.unwrap_or_else(|| LiePresentation::abelian(s.dim_v()));
                let dm = d.map.as_ref().map(|m| build_matrix(m, s.dim_v(), s.dim_u())).transpose()?;
                let dm = dm.unwrap_or_else(|| zero_matrix(s.dim_v(), s.dim_u()));
                if !mc.is_zero() {
                    return Err(Error::NotMaurerCartan);
                }
                let delta_t = s.encode_u(&du)?.add(&s.encode_v(&dv)?);
                let chk = crate::vdata::thm_machine_check(s.vdata(), &phi, &delta_t, &s.encode_map(&dm)?)?;
                r.info(
                    "deformation",
                    json!({"structure_and_mc": chk.lhs(), "twisted_mc": chk.rhs(), "twisted_residual_l": sparse(&chk.rhs_residual.l), "twisted_residual_a": sparse(&chk.rhs_residual.a)}),
                );
                r.check("deformation-sides-agree", chk.agrees(), None);
            }
        }
        Problem::Subalgebra { g, u_basis, v_basis, map, .. } => {
            let s = subalgebra_vdata(&g.build()?, &build_vectors(u_basis), &build_vectors(v_basis))?;
            let a = build_matrix(&require(map, "map")?, s.dim_v(), s.dim_u)?;
            let res = mc_residual(&DerivedAlgebra::new(s.vdata()), &s.encode_map(&a)?)?;
            let direct = s.graph_closure_oracle(&a)?;
            r.info("residual", sparse(&res)).info("curvature", sparse(&s.vdata().curvature()?));
            r.check("mc-residual-zero", res.is_zero(), None);
            r.check("dual-path-agree", res.is_zero() == direct, None);
        }
        Problem::Bialgebra { u, v, map, .. } => {
            let s = bialgebra_vdata(&u.build()?, &v.build()?)?;
            let a = build_matrix(&require(map, "map")?, s.dim_v(), s.dim_u())?;
            let (m1, m2) = s.morphism_residual(&s.encode_map(&a)?)?;
            let direct = s.is_morphism_direct(&a);
            let zero = m1.is_zero() && m2.is_zero();
            r.info("residual_bracket", sparse(&m1)).info("residual_cobracket", sparse(&m2));
            r.info("direct_defect", json!({"bracket": defects(&s.lie_defect(&a)), "cobracket": defects(&s.dual_defect(&a))}));
            r.check("mc-residual-zero", zero, None);
            r.check("dual-path-agree", zero == direct, None);
        }
        Problem::AssocMorphism { u, v, map, .. } => {
            let s = AssocSetup::new(&u.build()?, &v.build()?, opts.cutoff.unwrap_or(3))?;
            let a = build_matrix(&require(map, "map")?, s.dim_v(), s.dim_u())?;
            let res = s.morphism_residual(&s.encode_map(&a)?);
            let direct = s.is_morphism_direct(&a);
            r.info("residual", sparse(&res)).info("direct_defect", defects(&s.homomorphism_defect(&a)));
            r.info("cutoff", json!(s.cutoff()));
            r.check("mc-residual-zero", res.is_zero(), None);
            r.check("dual-path-agree", res.is_zero() == direct, None);
        }
        Problem::Linf { linf, candidate, .. } => {
            let l = linf.build()?;
            let cutoff = linf_cutoff(opts, &l);
            let c = require(candidate, "candidate")?;
            if c.iter().any(|(i, _)| *i >= l.space().dim()) {
                return Err(Error::SizeMismatch("candidate index out of range".into()));
            }
            let phi: Vector = LinComb::from_terms(c.iter().map(|(i, s)| (*i, s.0.clone())));
            let res: Vector = mc_residual::<Rational, _>(&l, &phi)?;
            let pair = mcli_pair_check(&theta_from_linf(&l, cutoff)?, &phi)?;
            r.info("residual", sparse(&res)).info("cutoff", json!(cutoff));
            r.check("mc-residual-zero", res.is_zero(), None);
            r.check("dual-path-agree", pair.agrees() && pair.phi_is_mc == (res.is_zero() && pair.homological), None);
        }
        Problem::LinfMorphism { u, v, phi } => {
            let (lu, lv) = (u.build()?, v.build()?);
            let fam = build_family(&require(phi, "phi")?, lu.space(), lv.space())?;
            let s = LinfMorphismSetup::new(&lu, &lv, morphism_cutoff(opts, &lu, &lv, &fam))?;
            let mc = s.residual_mc(&fam)?;
            let direct = s.residual_direct(&fam)?;
            r.info("residual", sparse(&mc)).info("cutoff", json!(s.cutoff()));
            r.check("mc-residual-zero", mc.is_zero(), None);
            r.check("dual-path-agree", mc == direct.neg(), Some(sparse(&direct)));
        }
        _ => return Err(Error::Input(format!("kind {} has no candidate to evaluate", p.kind()))),
    }
    Ok(r)
}

struct SolveSettings {
    restarts: usize,
    initial: Option<Vec<f64>>,
    seed: u64,
    cfg: NewtonConfig,
}

fn settings(spec: &Option<SolverSpec>, opts: &Options) -> SolveSettings {
    let spec = spec.clone().unwrap_or_default();
    let mut cfg = NewtonConfig::default();
    if let Some(t) = opts.tol {
        cfg.tol = t;
    }
    if let Some(m) = opts.max_iter {
        cfg.max_iter = m;
    }
    if let Some(d) = spec.max_den {
        cfg.max_den = d;
    }
    SolveSettings {
        restarts: opts.restarts.or(spec.restarts).unwrap_or(50).max(1),
        initial: spec.initial,
        seed: opts.seed,
        cfg,
    }
}

struct SolveRun {
    outcome: Option<NewtonOutcome>,
    attempts: usize,
    last_error: Option<Error>,
}

fn solve_loop<A>(
    alg: &A,
    bq: &[<A as LInfinity<Rational>>::Elem],
    bp: &[<A as LInfinity<Poly>>::Elem],
    s: &SolveSettings,
) -> Result<SolveRun>
where
    A: LInfinity<Poly> + LInfinity<Rational>,
{
    let n = bq.len();
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut best: Option<NewtonOutcome> = None;
    let mut last_error = None;
    for attempt in 0..s.restarts {
        let seed: Vec<f64> = match (&s.initial, attempt) {
            (Some(x), 0) => {
                if x.len() != n {
                    return Err(Error::SizeMismatch(format!("initial point needs {n} entries")));
                }
                x.clone()
            }
            _ => (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect(),
        };
        match solve_mc_newton(alg, bp, bq, &seed, &s.cfg) {
            Ok(o) if o.verdict == Verdict::ExactSolution => {
                return Ok(SolveRun { outcome: Some(o), attempts: attempt + 1, last_error: None });
            }
            Ok(o) => {
                let better = match &best {
                    None => true,
                    Some(b) => b.verdict == Verdict::Diverged && o.verdict == Verdict::FloatOnly,
                };
                if better {
                    best = Some(o);
                }
            }
            Err(e @ Error::SingularJacobian { .. }) => last_error = Some(e),
            Err(e) => return Err(e),
        }
    }
    Ok(SolveRun { outcome: best, attempts: s.restarts, last_error })
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::ExactSolution => "exact-solution",
        Verdict::FloatOnly => "float-only",
        Verdict::Diverged => "diverged",
    }
}

/// Writes the run into the report; returns the exact point if one was found.
fn report_run(r: &mut Report, run: SolveRun) -> Option<Vec<Rational>> {
    r.info("attempts", json!(run.attempts));
    match run.outcome {
        Some(o) => {
            r.info("verdict", json!(verdict_name(o.verdict)));
            r.info("iterations", json!(o.iterations));
            if let Some(x) = o.exact {
                r.info("solution", vector(&x));
                Some(x)
            } else {
                r.info("last_iterate", json!(o.iterate));
                r.exit_with(EXIT_TRUNCATION);
                None
            }
        }
        None => {
            r.info("verdict", json!("diverged"));
            if let Some(Error::SingularJacobian { iterate }) = run.last_error {
                r.info("last_iterate", json!(iterate));
            }
            r.exit_with(EXIT_TRUNCATION);
            None
        }
    }
}

fn map_basis<K: Ord + Clone + Debug>(
    rows: usize,
    cols: usize,
    enc: impl Fn(&Matrix) -> Result<LinComb<K>>,
) -> Result<(Vec<LinComb<K>>, Vec<LinComb<K, Poly>>)> {
    let mut bq = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            bq.push(enc(&unit_matrix(rows, cols, r, c))?);
        }
    }
    let bp = bq.iter().map(|x| x.lift::<Poly>()).collect();
    Ok((bq, bp))
}

fn reshape(x: &[Rational], rows: usize, cols: usize) -> Matrix {
    (0..rows).map(|r| x[r * cols..(r + 1) * cols].to_vec()).collect()
}

fn matrix_spec(m: &Matrix) -> Value {
    matrix(m)
}

fn lie_spec(dim: usize, entries: &[(usize, usize, usize, Rational)]) -> Value {
    let b: Vec<Value> = entries.iter().filter(|e| !e.3.is_zero()).map(|(i, j, k, c)| json!([i, j, k, scalar(c)])).collect();
    json!({"dim": dim, "bracket": b})
}

fn upper_keys(dim: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for i in 0..dim {
        for j in i + 1..dim {
            for k in 0..dim {
                out.push((i, j, k));
            }
        }
    }
    out
}

fn echo_with(raw: &Value, changes: &[(&str, Value)]) -> Value {
    let mut v = raw.clone();
    if let Value::Object(m) = &mut v {
        for (k, x) in changes {
            m.insert((*k).into(), x.clone());
        }
        m.remove("solver");
    }
    v
}

pub fn solve(p: &Problem, raw: &Value, opts: &Options) -> Result<Report> {
    let mut r = Report::new("solve", p.kind());
    match p {
        Problem::LieMorphism { u, v, solver, .. } => {
            let st = settings(solver, opts);
            let (up, vp) = (u.build()?, v.build()?);
            let s = MorphismSetup::new(up.clone(), vp.clone())?;
            let (du, dv) = (s.dim_u(), s.dim_v());
            let mode = solver.as_ref().map(|x| x.mode).unwrap_or_default();
            r.info("mode", json!(if mode == SolveMode::Map { "map" } else { "simultaneous" }));
            if mode == SolveMode::Map {
                let (bq, bp) = map_basis(dv, du, |m| s.encode_map(m))?;
                let run = solve_loop(&DerivedAlgebra::new(s.vdata()), &bq, &bp, &st)?;
                if let Some(x) = report_run(&mut r, run) {
                    let a = reshape(&x, dv, du);
                    r.check("direct-check", s.is_morphism_direct(&a)?, None);
                    r.info("solution_file", echo_with(raw, &[("map", matrix_spec(&a))]));
                }
            } else {
                // Unknowns: c_U (i < j), c_V (i < j), then the map; the system is cubic.
                let zero = s.zero_delta_vdata();
                let big = BigAlgebra::new(&zero)?;
                let (ku, kv) = (upper_keys(du), upper_keys(dv));
                let mut bq: Vec<BigElem<VfKey, Rational>> = Vec::new();
                for &(i, j, k) in &ku {
                    bq.push(BigElem::from_l(s.encode_u(&LiePresentation::from_entries(du, &[(i, j, k, q(1))])?)?));
                }
                for &(i, j, k) in &kv {
                    bq.push(BigElem::from_l(s.encode_v(&LiePresentation::from_entries(dv, &[(i, j, k, q(1))])?)?));
                }
                for rr in 0..dv {
                    for c in 0..du {
                        bq.push(BigElem::from_a(s.encode_map(&unit_matrix(dv, du, rr, c))?));
                    }
                }
                let bp: Vec<BigElem<VfKey, Poly>> = bq.iter().map(|b| BigElem::new(b.l.lift(), b.a.lift())).collect();
                let run = solve_loop(&big, &bq, &bp, &st)?;
                if let Some(x) = report_run(&mut r, run) {
                    let eu: Vec<_> = ku.iter().zip(&x).map(|(&(i, j, k), c)| (i, j, k, c.clone())).collect();
                    let ev: Vec<_> = kv.iter().zip(&x[ku.len()..]).map(|(&(i, j, k), c)| (i, j, k, c.clone())).collect();
                    let a = reshape(&x[ku.len() + kv.len()..], dv, du);
                    let triple = MorphismTriple {
                        u: LiePresentation::from_entries(du, &eu)?,
                        v: LiePresentation::from_entries(dv, &ev)?,
                        phi: a.clone(),
                    };
                    r.check("direct-check", triple.is_mc()?, None);
                    r.info(
                        "solution_file",
                        echo_with(raw, &[("u", lie_spec(du, &eu)), ("v", lie_spec(dv, &ev)), ("map", matrix_spec(&a))]),
                    );
                }
            }
        }
        Problem::Subalgebra { g, u_basis, v_basis, solver, .. } => {
            let st = settings(solver, opts);
            let s = subalgebra_vdata(&g.build()?, &build_vectors(u_basis), &build_vectors(v_basis))?;
            let (du, dv) = (s.dim_u, s.dim_v());
            let (bq, bp) = map_basis(dv, du, |m| s.encode_map(m))?;
            let run = solve_loop(&DerivedAlgebra::new(s.vdata()), &bq, &bp, &st)?;
            if let Some(x) = report_run(&mut r, run) {
                let a = reshape(&x, dv, du);
                r.check("direct-check", s.graph_closure_oracle(&a)?, None);
                r.info("solution_file", echo_with(raw, &[("map", matrix_spec(&a))]));
            }
        }
        Problem::Bialgebra { u, v, solver, .. } => {
            let st = settings(solver, opts);
            let s = bialgebra_vdata(&u.build()?, &v.build()?)?;
            let (du, dv) = (s.dim_u(), s.dim_v());
            let (bq, bp) = map_basis(dv, du, |m| s.encode_map(m))?;
            let run = solve_loop(&DerivedAlgebra::new(s.vdata()), &bq, &bp, &st)?;
            if let Some(x) = report_run(&mut r, run) {
                let a = reshape(&x, dv, du);
                r.check("direct-check", s.is_morphism_direct(&a), None);
                r.info("solution_file", echo_with(raw, &[("map", matrix_spec(&a))]));
            }
        }
        Problem::AssocMorphism { u, v, solver, .. } => {
            let st = settings(solver, opts);
            let s = AssocSetup::new(&u.build()?, &v.build()?, opts.cutoff.unwrap_or(3))?;
            let (du, dv) = (s.dim_u(), s.dim_v());
            let (bq, bp) = map_basis(dv, du, |m| s.encode_map(m))?;
            let run = solve_loop(&DerivedAlgebra::new(s.vdata()), &bq, &bp, &st)?;
            if let Some(x) = report_run(&mut r, run) {
                let a = reshape(&x, dv, du);
                r.check("direct-check", s.is_morphism_direct(&a), None);
                r.info("solution_file", echo_with(raw, &[("map", matrix_spec(&a))]));
            }
        }
        Problem::Linf { linf, solver, .. } => {
            let st = settings(solver, opts);
            let l = linf.build()?;
            let idx: Vec<usize> = (0..l.space().dim()).filter(|&i| l.space().degree(i) == 0).collect();
            let bq: Vec<Vector> = idx.iter().map(|&i| Vector::single(i)).collect();
            let bp: Vec<LinComb<usize, Poly>> = bq.iter().map(|b| b.lift()).collect();
            let run = solve_loop(&l, &bq, &bp, &st)?;
            if let Some(x) = report_run(&mut r, run) {
                let cand: Vec<Value> =
                    idx.iter().zip(&x).filter(|(_, c)| !c.is_zero()).map(|(i, c)| json!([i, scalar(c)])).collect();
                r.info("solution_file", echo_with(raw, &[("candidate", Value::Array(cand))]));
            }
        }
        _ => return Err(Error::Input(format!("solve is not available for kind {}", p.kind()))),
    }
    Ok(r)
}

/// Nonzero brackets of `alg` on basis elements up to `max_arity`, with an optional second
/// evaluation of every bracket for comparison.
fn table_rows<A, K>(
    alg: &A,
    keys: &[K],
    max_arity: usize,
    other: Option<&dyn Fn(&[LinComb<K>]) -> Result<LinComb<K>>>,
) -> Result<(Vec<Value>, bool)>
where
    A: LInfinity<Rational, Elem = LinComb<K>>,
    K: Ord + Clone + Debug + Label,
{
    let mut rows = Vec::new();
    let mut agree = true;
    let curv = alg.curvature()?;
    if !curv.is_zero() {
        rows.push(json!({"arity": 0, "inputs": [], "output": sparse(&curv)}));
    }
    for n in 1..=max_arity {
        if count_multisets(keys.len(), n) > MAX_TUPLES {
            return Err(Error::Input(format!("arity window {max_arity} is too large for {} basis elements", keys.len())));
        }
        for t in multisets(keys.len(), n) {
            let args: Vec<LinComb<K>> = t.iter().map(|&i| LinComb::single(keys[i].clone())).collect();
            let v = alg.bracket(&args)?;
            if let Some(f) = other {
                agree &= f(&args)? == v;
            }
            if !v.is_zero() {
                let ins: Vec<String> = t.iter().map(|&i| keys[i].label()).collect();
                rows.push(json!({"arity": n, "inputs": ins, "output": sparse(&v)}));
            }
        }
    }
    Ok((rows, agree))
}

fn a_keys<G: GradedLie>(vd: &VData<G>) -> Vec<G::Key> {
    let (lo, hi) = vd.lie().degree_range();
    (lo..=hi).flat_map(|d| vd.abelian_basis(d)).collect()
}

fn max_row_arity(rows: &[Value]) -> usize {
    rows.iter().filter_map(|r| r["arity"].as_u64()).max().unwrap_or(0) as usize
}

pub fn brackets(p: &Problem, opts: &Options) -> Result<Report> {
    let mut r = Report::new("brackets", p.kind());
    let window = opts.arity.unwrap_or(DEFAULT_ARITY);
    r.info("arity_window", json!(window));
    match p {
        Problem::LieMorphism { u, v, map, .. } => {
            let s = MorphismSetup::new(u.build()?, v.build()?)?;
            let a = match map {
                Some(m) => build_matrix(m, s.dim_v(), s.dim_u())?,
                None => zero_matrix(s.dim_v(), s.dim_u()),
            };
            let nr = s.nr_algebra(&a)?;
            let tw = s.twisted(&a)?;
            let generic = DerivedAlgebra::new(&tw);
            let keys = a_keys(s.vdata());
            let cmp = |args: &[LinComb<VfKey>]| LInfinity::<Rational>::bracket(&generic, args);
            let (rows, agree) = table_rows(&nr, &keys, window, Some(&cmp))?;
            let bound = s.dim_v() + 1;
            r.check("explicit-matches-generic", agree, None);
            r.check("vanishing-bound", max_row_arity(&rows) <= bound, Some(json!({"bound": bound})));
            r.info("brackets", Value::Array(rows));
        }
        Problem::Subalgebra { g, u_basis, v_basis, .. } => {
            let s = subalgebra_vdata(&g.build()?, &build_vectors(u_basis), &build_vectors(v_basis))?;
            let (rows, _) = table_rows(&DerivedAlgebra::new(s.vdata()), &a_keys(s.vdata()), window, None)?;
            r.info("brackets", Value::Array(rows));
        }
        Problem::Bialgebra { u, v, map, .. } => {
            let s = bialgebra_vdata(&u.build()?, &v.build()?)?;
            let a = match map {
                Some(m) => build_matrix(m, s.dim_v(), s.dim_u())?,
                None => zero_matrix(s.dim_v(), s.dim_u()),
            };
            let tw = s.vdata().twist(&s.encode_map(&a)?)?;
            let (rows, _) = table_rows(&DerivedAlgebra::new(&tw), &a_keys(s.vdata()), window, None)?;
            r.info("brackets", Value::Array(rows));
        }
        Problem::AssocMorphism { u, v, map, .. } => {
            let s = AssocSetup::new(&u.build()?, &v.build()?, opts.cutoff.unwrap_or(3))?;
            if window > s.cutoff() {
                return Err(Error::WindowExceeded { arity: window, window: s.cutoff() });
            }
            let a = match map {
                Some(m) => build_matrix(m, s.dim_v(), s.dim_u())?,
                None => zero_matrix(s.dim_v(), s.dim_u()),
            };
            let tw = s.twisted(&a)?;
            let (rows, _) = table_rows(&DerivedAlgebra::new(&tw), &a_keys(s.vdata()), window, None)?;
            r.info("brackets", Value::Array(rows)).info("cutoff", json!(s.cutoff()));
        }
        Problem::Linf { linf, .. } => {
            let l = linf.build()?;
            let cutoff = linf_cutoff(opts, &l);
            if window > cutoff {
                return Err(Error::WindowExceeded { arity: window, window: cutoff });
            }
            let rec = keyli_recover(&l, cutoff)?;
            r.check("recovery-matches", rec.matches(), rec.mismatch.map(|m| json!(m)));
            r.info("brackets", linf_rows(&rec.recovered, window)).info("cutoff", json!(cutoff));
        }
        Problem::Ainf { algebra, ainf } => {
            let theta = ainf_theta(algebra, ainf, opts)?;
            if window > theta.algebra().cutoff() {
                return Err(Error::WindowExceeded { arity: window, window: theta.algebra().cutoff() });
            }
            let s = symmetrize_ainf(&theta)?;
            r.check("derived-matches-direct", s.agrees(), None);
            r.info("brackets", linf_rows(&s.linf, window)).info("cutoff", json!(theta.algebra().cutoff()));
        }
        Problem::LinfMorphism { u, v, phi } => {
            let (lu, lv) = (u.build()?, v.build()?);
            let fam = phi.as_ref().map(|f| build_family(f, lu.space(), lv.space())).transpose()?.unwrap_or_default();
            let s = LinfMorphismSetup::new(&lu, &lv, morphism_cutoff(opts, &lu, &lv, &fam))?;
            if window > s.cutoff() {
                return Err(Error::WindowExceeded { arity: window, window: s.cutoff() });
            }
            let tw = s.vdata().twist(&s.encode_family(&fam)?)?;
            let (rows, _) = table_rows(&DerivedAlgebra::new(&tw), &a_keys(s.vdata()), window, None)?;
            r.info("brackets", Value::Array(rows)).info("cutoff", json!(s.cutoff()));
        }
        _ => return Err(Error::Input(format!("kind {} has no bracket tables", p.kind()))),
    }
    Ok(r)
}

fn linf_rows(l: &DirectLInf, window: usize) -> Value {
    let mut rows = Vec::new();
    for t in l.tables().iter().filter(|t| t.arity() <= window) {
        for (inp, v) in t.entries() {
            if !v.is_zero() {
                let ins: Vec<String> = inp.iter().map(|i| i.label()).collect();
                rows.push(json!({"arity": t.arity(), "inputs": ins, "output": sparse(v)}));
            }
        }
    }
    Value::Array(rows)
}
