//! Damped Gauss-Newton on polynomial Maurer-Cartan systems. Float iterates are only ever
//! reported as solutions after rationalization and an exact check.

use super::linf::{mc_residual, LInfinity};
use crate::error::{Error, Result};
use crate::graded_core::scalar::{rationalize, to_f64};
use crate::graded_core::{Coeff, Poly, Rational};
use nalgebra::{DMatrix, DVector};

/// A polynomial map `Q^n → Q^m` given by its coordinate polynomials.
#[derive(Clone, Debug)]
pub struct PolySystem {
    pub vars: usize,
    pub equations: Vec<Poly>,
}

impl PolySystem {
    pub fn new(vars: usize, equations: Vec<Poly>) -> Self {
        PolySystem { vars, equations: equations.into_iter().filter(|p| !p.is_zero()).collect() }
    }

    pub fn eval(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.equations.len(), self.equations.iter().map(|p| p.eval_f64(x)))
    }

    pub fn eval_exact(&self, x: &[Rational]) -> Vec<Rational> {
        self.equations.iter().map(|p| p.eval_exact(x)).collect()
    }

    pub fn jacobian(&self) -> Vec<Vec<Poly>> {
        self.equations.iter().map(|p| (0..self.vars).map(|i| p.derivative(i)).collect()).collect()
    }

    /// Fixes variable `i` to `value`; the variable stays in place but no longer occurs.
    pub fn fix(&self, i: usize, value: &Rational) -> PolySystem {
        PolySystem::new(self.vars, self.equations.iter().map(|p| p.substitute(i, value)).collect())
    }
}

/// Maurer-Cartan residual of `Σ x_i b_i` as polynomials in the `x_i`, one per output coordinate.
pub fn mc_system<A: LInfinity<Poly>>(alg: &A, basis: &[A::Elem]) -> Result<PolySystem> {
    let mut phi = alg.zero();
    for (i, b) in basis.iter().enumerate() {
        phi = alg.add(&phi, &alg.scale(b, &Poly::var(i)));
    }
    let r = mc_residual(alg, &phi)?;
    Ok(PolySystem::new(basis.len(), alg.coordinates(&r).into_iter().map(|(_, c)| c).collect()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ExactSolution,
    FloatOnly,
    Diverged,
}

#[derive(Clone, Debug)]
pub struct NewtonConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub max_den: u64,
    /// Try fixing near-rational coordinates one at a time when plain rounding fails.
    pub snap: bool,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig { tol: 1e-11, max_iter: 200, max_den: 64, snap: true }
    }
}

#[derive(Clone, Debug)]
pub struct NewtonOutcome {
    pub verdict: Verdict,
    pub iterate: Vec<f64>,
    pub exact: Option<Vec<Rational>>,
    pub iterations: usize,
    pub residual_norm: f64,
}

struct Run {
    x: Vec<f64>,
    iterations: usize,
    norm: f64,
    converged: bool,
}

fn newton_run(sys: &PolySystem, jac: &[Vec<Poly>], seed: &[f64], frozen: &[bool], cfg: &NewtonConfig) -> Result<Run> {
    let n = sys.vars;
    let mut x = seed.to_vec();
    let mut f = sys.eval(&x);
    let mut norm = f.norm();
    for it in 0..cfg.max_iter {
        if !norm.is_finite() {
            return Ok(Run { x, iterations: it, norm, converged: false });
        }
        if norm < cfg.tol {
            return Ok(Run { x, iterations: it, norm, converged: true });
        }
        let free: Vec<usize> = (0..n).filter(|&i| !frozen[i]).collect();
        let j = DMatrix::from_fn(sys.equations.len(), free.len(), |r, c| jac[r][free[c]].eval_f64(&x));
        if j.iter().all(|v| *v == 0.0) {
            return Err(Error::SingularJacobian { iterate: x });
        }
        let pinv = j.clone().pseudo_inverse(1e-12).map_err(|_| Error::SingularJacobian { iterate: x.clone() })?;
        let step = -(pinv * &f);
        let mut t = 1.0;
        loop {
            let mut trial = x.clone();
            for (c, &i) in free.iter().enumerate() {
                trial[i] += t * step[c];
            }
            let ft = sys.eval(&trial);
            let nt = ft.norm();
            if nt < norm || t < 1e-8 {
                x = trial;
                f = ft;
                norm = nt;
                break;
            }
            t *= 0.5;
        }
    }
    let converged = norm < cfg.tol;
    Ok(Run { x, iterations: cfg.max_iter, norm, converged })
}

fn rationalize_all(x: &[f64], max_den: u64) -> Option<Vec<Rational>> {
    x.iter().map(|v| rationalize(*v, max_den)).collect()
}

/// Runs the solver; `verify` must decide exactly whether a rational point is a solution.
pub fn solve_newton(
    sys: &PolySystem,
    seed: &[f64],
    cfg: &NewtonConfig,
    verify: impl Fn(&[Rational]) -> Result<bool>,
) -> Result<NewtonOutcome> {
    if seed.len() != sys.vars {
        return Err(Error::SizeMismatch(format!("seed has {} entries, system has {} unknowns", seed.len(), sys.vars)));
    }
    let jac = sys.jacobian();
    let frozen = vec![false; sys.vars];
    let run = newton_run(sys, &jac, seed, &frozen, cfg)?;
    let mut total_iter = run.iterations;
    if !run.converged {
        return Ok(NewtonOutcome {
            verdict: Verdict::Diverged,
            iterate: run.x,
            exact: None,
            iterations: total_iter,
            residual_norm: run.norm,
        });
    }
    if let Some(cand) = rationalize_all(&run.x, cfg.max_den) {
        if verify(&cand)? {
            return Ok(NewtonOutcome {
                verdict: Verdict::ExactSolution,
                iterate: run.x,
                exact: Some(cand),
                iterations: total_iter,
                residual_norm: run.norm,
            });
        }
    }
    if cfg.snap {
        // Coarse denominators first: fixing coordinates at simple values keeps the rest rational
        // more often than fixing them at their closest approximations.
        let mut den = 1;
        loop {
            let den_now = den.min(cfg.max_den);
            let (found, iters) = snap_search(sys, &run.x, cfg, den_now, &verify)?;
            total_iter += iters;
            if let Some((x, cand, norm)) = found {
                return Ok(NewtonOutcome {
                    verdict: Verdict::ExactSolution,
                    iterate: x,
                    exact: Some(cand),
                    iterations: total_iter,
                    residual_norm: norm,
                });
            }
            if den_now >= cfg.max_den {
                break;
            }
            den *= 2;
        }
    }
    Ok(NewtonOutcome {
        verdict: Verdict::FloatOnly,
        iterate: run.x,
        exact: None,
        iterations: total_iter,
        residual_norm: run.norm,
    })
}

type Snapped = (Vec<f64>, Vec<Rational>, f64);

/// Fixes one free coordinate at a time to a rational with denominator at most `den` and
/// re-solves for the others, until the rounded point verifies or Newton stops converging.
fn snap_search(
    sys: &PolySystem,
    start: &[f64],
    cfg: &NewtonConfig,
    den: u64,
    verify: &impl Fn(&[Rational]) -> Result<bool>,
) -> Result<(Option<Snapped>, usize)> {
    let mut frozen = vec![false; sys.vars];
    let mut fixed: Vec<Option<Rational>> = vec![None; sys.vars];
    let mut current = sys.clone();
    let mut x = start.to_vec();
    let mut total = 0;
    loop {
        let best = (0..sys.vars)
            .filter(|&i| !frozen[i])
            .filter_map(|i| rationalize(x[i], den).map(|r| (i, (to_f64(&r) - x[i]).abs(), r)))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let Some((i, _, r)) = best else { return Ok((None, total)) };
        frozen[i] = true;
        current = current.fix(i, &r);
        let jac = current.jacobian();
        x[i] = to_f64(&r);
        fixed[i] = Some(r);
        let run = match newton_run(&current, &jac, &x, &frozen, cfg) {
            Ok(r) => r,
            Err(Error::SingularJacobian { .. }) => {
                // Every equation became constant: the remaining point is either exact or not.
                let norm = current.eval(&x).norm();
                Run { x: x.clone(), iterations: 0, norm, converged: norm < cfg.tol }
            }
            Err(e) => return Err(e),
        };
        total += run.iterations;
        if !run.converged {
            return Ok((None, total));
        }
        x = run.x;
        if let Some(cand) = rationalize_all(&x, cfg.max_den) {
            let cand: Vec<Rational> = cand.into_iter().enumerate().map(|(i, c)| fixed[i].clone().unwrap_or(c)).collect();
            if verify(&cand)? {
                return Ok((Some((x, cand, run.norm)), total));
            }
        }
    }
}

/// Newton on the Maurer-Cartan equation of `alg` restricted to the span of `basis`, with
/// exact re-verification through [`mc_residual`] over the rationals.
pub fn solve_mc_newton<A>(
    alg: &A,
    basis_poly: &[<A as LInfinity<Poly>>::Elem],
    basis_q: &[<A as LInfinity<Rational>>::Elem],
    seed: &[f64],
    cfg: &NewtonConfig,
) -> Result<NewtonOutcome>
where
    A: LInfinity<Poly> + LInfinity<Rational>,
{
    if basis_poly.len() != basis_q.len() {
        return Err(Error::SizeMismatch("basis lists differ in length".into()));
    }
    let sys = mc_system::<A>(alg, basis_poly)?;
    solve_newton(&sys, seed, cfg, |x| {
        let mut phi = <A as LInfinity<Rational>>::zero(alg);
        for (b, c) in basis_q.iter().zip(x) {
            phi = LInfinity::<Rational>::add(alg, &phi, &LInfinity::<Rational>::scale(alg, b, c));
        }
        let r = mc_residual::<Rational, A>(alg, &phi)?;
        Ok(LInfinity::<Rational>::is_zero(alg, &r))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded_core::q;

    #[test]
    fn circle_meets_line_exactly() {
        // x^2 + y^2 - 1 = 0, x - y = 0 has no rational point; x - 3/5 = 0 gives (3/5, 4/5).
        let x = Poly::var(0);
        let y = Poly::var(1);
        let circle = x.mul(&x).add(&y.mul(&y)).sub(&Poly::constant(q(1)));
        let sys = PolySystem::new(2, vec![circle.clone(), x.sub(&Poly::constant(q(3) / q(5)))]);
        let s2 = sys.clone();
        let out = solve_newton(&sys, &[0.5, 0.9], &NewtonConfig::default(), |p| {
            Ok(s2.eval_exact(p).iter().all(|v| v == &q(0)))
        })
        .unwrap();
        assert_eq!(out.verdict, Verdict::ExactSolution);
        assert_eq!(out.exact.unwrap(), vec![q(3) / q(5), q(4) / q(5)]);

        let diag = PolySystem::new(2, vec![circle, x.sub(&y)]);
        let d2 = diag.clone();
        let out = solve_newton(&diag, &[0.5, 0.9], &NewtonConfig { snap: false, ..Default::default() }, |p| {
            Ok(d2.eval_exact(p).iter().all(|v| v == &q(0)))
        })
        .unwrap();
        assert_eq!(out.verdict, Verdict::FloatOnly);
        assert!(out.exact.is_none());
    }

    #[test]
    fn zero_jacobian_is_reported() {
        // x^2 + 1 has J = 0 at x = 0.
        let x = Poly::var(0);
        let sys = PolySystem::new(1, vec![x.mul(&x).add(&Poly::constant(q(1)))]);
        let err = solve_newton(&sys, &[0.0], &NewtonConfig::default(), |_| Ok(false)).unwrap_err();
        assert!(matches!(err, Error::SingularJacobian { .. }));
    }
}
