use linf_deform::assoc_deform::{assoc_vdata, AssocPresentation};
use linf_deform::graded_core::linalg::{determinant, identity, Matrix};
use linf_deform::graded_core::scalar::{format_rational, parse_rational, rationalize};
use linf_deform::graded_core::{q, Coeff, LinComb, Poly, Rational};
use linf_deform::graded_lie::{bracket, full_basis, GradedLie, VectorFields, VfKey};
use linf_deform::lie_deform::{gl_action, LiePresentation, MorphismSetup, MorphismTriple};
use linf_deform::vdata::{solve_newton, DerivedAlgebra, LInfinity, NewtonConfig, PolySystem, Verdict};
use proptest::prelude::*;

fn matrix(entries: &[i64]) -> Matrix {
    entries.chunks(2).map(|r| r.iter().map(|&x| q(x)).collect()).collect()
}

fn sign(d1: i32, d2: i32) -> Rational {
    if (d1 * d2) % 2 == 0 {
        q(1)
    } else {
        q(-1)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_text_round_trip(n in -1000i64..1000, d in 1i64..1000) {
        let x = Rational::new(n.into(), d.into());
        prop_assert_eq!(parse_rational(&format_rational(&x)), Some(x));
    }

    #[test]
    fn rationalize_recovers_small_fractions(n in -200i64..200, d in 1i64..64) {
        let x = Rational::new(n.into(), d.into());
        prop_assert_eq!(rationalize(n as f64 / d as f64, 64), Some(x));
    }

    #[test]
    fn lincomb_addition_cancels(a in prop::collection::vec((0usize..6, -5i64..5), 0..6), b in prop::collection::vec((0usize..6, -5i64..5), 0..6)) {
        let x: LinComb<usize> = LinComb::from_terms(a.into_iter().map(|(k, c)| (k, q(c))));
        let y: LinComb<usize> = LinComb::from_terms(b.into_iter().map(|(k, c)| (k, q(c))));
        prop_assert_eq!(x.add(&y).sub(&y), x.clone());
        prop_assert_eq!(x.add(&y), y.add(&x));
        prop_assert!(x.add(&x.neg()).is_zero());
    }

    #[test]
    fn vector_field_bracket_is_graded_lie(i in 0usize..1000, j in 0usize..1000, k in 0usize..1000) {
        let vf = VectorFields::new(3).unwrap();
        let keys = full_basis(&vf);
        let pick = |n: usize| keys[n % keys.len()];
        let (a, b, c) = (pick(i), pick(j), pick(k));
        let (da, db) = (vf.degree(&a), vf.degree(&b));
        let f = |key: VfKey| LinComb::<VfKey>::single(key);
        let ab = bracket(&vf, &f(a), &f(b)).unwrap();
        let ba = bracket(&vf, &f(b), &f(a)).unwrap();
        // [a, b] = -(-1)^{|a||b|} [b, a]
        prop_assert_eq!(ab.clone(), ba.scale(&-sign(da, db)));
        // [a, [b, c]] = [[a, b], c] + (-1)^{|a||b|} [b, [a, c]]
        let lhs = bracket(&vf, &f(a), &bracket(&vf, &f(b), &f(c)).unwrap()).unwrap();
        let rhs = bracket(&vf, &ab, &f(c))
            .unwrap()
            .add(&bracket(&vf, &f(b), &bracket(&vf, &f(a), &f(c)).unwrap()).unwrap().scale(&sign(da, db)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn derived_brackets_are_graded_symmetric(i in 0usize..100, j in 0usize..100) {
        let s = MorphismSetup::new(LiePresentation::aff2(), LiePresentation::aff2()).unwrap();
        let d = DerivedAlgebra::new(s.vdata());
        let keys: Vec<VfKey> = full_basis(s.vector_fields()).into_iter().filter(|k| s.vdata().in_abelian(k)).collect();
        let (a, b) = (keys[i % keys.len()], keys[j % keys.len()]);
        // Degrees on the shifted space are the Lie degrees.
        let (da, db) = (s.vector_fields().degree(&a), s.vector_fields().degree(&b));
        let x: LinComb<VfKey> = d.bracket(&[LinComb::single(a), LinComb::single(b)]).unwrap();
        let y: LinComb<VfKey> = d.bracket(&[LinComb::single(b), LinComb::single(a)]).unwrap();
        prop_assert_eq!(x, y.scale(&sign(da, db)));
    }

    #[test]
    fn lie_morphism_mc_iff_direct(e in prop::array::uniform4(-3i64..=3)) {
        let s = MorphismSetup::new(LiePresentation::aff2(), LiePresentation::aff2()).unwrap();
        let a = matrix(&e);
        prop_assert_eq!(s.is_morphism_mc(&a).unwrap(), s.is_morphism_direct(&a).unwrap());
    }

    #[test]
    fn assoc_morphism_mc_iff_direct(e in prop::array::uniform4(-3i64..=3)) {
        let d = AssocPresentation::dual_numbers();
        let s = assoc_vdata(&d, &d).unwrap();
        let a = matrix(&e);
        prop_assert_eq!(s.is_morphism_mc(&a).unwrap(), s.is_morphism_direct(&a));
    }

    #[test]
    fn gl_action_preserves_morphisms(g in prop::array::uniform4(-3i64..=3), h in prop::array::uniform4(-3i64..=3)) {
        let (g, h) = (matrix(&g), matrix(&h));
        prop_assume!(!determinant(&g).unwrap().is_zero() && !determinant(&h).unwrap().is_zero());
        let m = MorphismTriple { u: LiePresentation::aff2(), v: LiePresentation::aff2(), phi: identity(2) };
        let out = gl_action(&g, &h, &m).unwrap();
        prop_assert!(out.is_mc().unwrap());
        let back = gl_action(
            &linf_deform::graded_core::linalg::inverse(&g).unwrap(),
            &linf_deform::graded_core::linalg::inverse(&h).unwrap(),
            &out,
        ).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn newton_exact_only_when_verified(a in 1i64..6, b in -10i64..10, c in 1i64..4) {
        // (a x - b)(x² + c) has the single real root b / a.
        let x = Poly::var(0);
        let lin = x.scale(&q(a)).sub(&Poly::constant(q(b)));
        let sys = PolySystem::new(1, vec![lin.mul(&x.mul(&x).add(&Poly::constant(q(c))))]);
        let s2 = sys.clone();
        let out = solve_newton(&sys, &[0.3], &NewtonConfig::default(), |p| Ok(s2.eval_exact(p).iter().all(Coeff::is_zero))).unwrap();
        match out.verdict {
            Verdict::ExactSolution => prop_assert_eq!(out.exact, Some(vec![Rational::new(b.into(), a.into())])),
            _ => prop_assert!(out.exact.is_none()),
        }
    }
}
