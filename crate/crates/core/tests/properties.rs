use std::f64::consts::PI;

use fuzzynorm::fuzzy_norm::{check_axioms, check_crisp_strict_convexity, check_strict_convexity, probe_strict_convexity};
use fuzzynorm::geometry::{check_min_inequalities, find_midpoints, verify_midpoint};
use fuzzynorm::isometry::{
    check_collinearity_preservation, check_isometry, make_perturbed_isometry, make_rigid_map, make_sine_curve_map,
    probe_isometry, random_orthogonal, MapSpec,
};
use fuzzynorm::mazur_ulam::{
    certify_affine, check_q_linearity, fit_affine, normalize, probe_midpoint_preservation,
};
use fuzzynorm::replay::{replay, ReplayContext};
use fuzzynorm::sequences::{check_cauchy, check_convergence};
use fuzzynorm::vecspace::crisp_norm;
use fuzzynorm::{
    CertificateVerdict, CertifyOptions, CrispNormKind, FuzzyNorm, MidpointProblem, SamplePlan, SequenceSpec, Vector,
    WitnessData,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn vector(dim: usize, r: f64) -> impl Strategy<Value = Vector> {
    prop::collection::vec(-r..r, dim).prop_map(|c| Vector::new(c).unwrap())
}

fn kind() -> impl Strategy<Value = CrispNormKind> {
    prop_oneof![
        Just(CrispNormKind::Euclidean),
        Just(CrispNormKind::MaxNorm),
        (1.0f64..6.0).prop_map(|p| CrispNormKind::PNorm { p }),
        Just(CrispNormKind::WeightedEuclidean { weights: vec![0.5, 2.0, 1.0] }),
    ]
}

fn plan() -> impl Strategy<Value = SamplePlan> {
    (any::<u64>(), 1usize..40, 0.01f64..20.0, 1e-3f64..1.0, 1.0f64..1e3, 1usize..8).prop_map(
        |(seed, n_points, point_radius, lo, span, n_thresholds)| SamplePlan {
            seed,
            n_points,
            point_radius,
            a_range: (lo, lo * span),
            n_thresholds,
            ..SamplePlan::default()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn crisp_norm_axioms(k in kind(), u in vector(3, 10.0), w in vector(3, 10.0), c in -5.0f64..5.0) {
        let nu = crisp_norm(&u, &k).unwrap();
        let scaled = crisp_norm(&u.scale(c), &k).unwrap();
        prop_assert!((scaled - c.abs() * nu).abs() <= 1e-12 * scaled.max(1.0));
        let sum = crisp_norm(&u.add(&w).unwrap(), &k).unwrap();
        prop_assert!(sum <= nu + crisp_norm(&w, &k).unwrap() + 1e-12);
    }

    #[test]
    fn euclidean_crisp_strict_convexity_holds(p in plan(), dim in 1usize..6) {
        prop_assert!(check_crisp_strict_convexity(&CrispNormKind::Euclidean, dim, &p).unwrap().passed());
    }

    #[test]
    fn evaluate_is_monotone_in_threshold(
        name in prop::sample::select(vec!["crisp_induced", "exponential", "step"]),
        k in kind(),
        x in vector(3, 5.0),
        mut grid in prop::collection::vec(-10.0f64..100.0, 2..20),
    ) {
        let n = FuzzyNorm::named(name, k, 3).unwrap();
        grid.sort_by(f64::total_cmp);
        let values: Vec<f64> = grid.iter().map(|&a| n.evaluate(&x, a).unwrap()).collect();
        prop_assert!(values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn induced_scaling_identity(k in kind(), x in vector(3, 5.0), c in -8.0f64..8.0, a in 1e-3f64..1e3) {
        prop_assume!(c.abs() > 1e-3);
        let n = FuzzyNorm::crisp_induced(k, 3).unwrap();
        let lhs = n.evaluate(&x, a).unwrap();
        let rhs = n.evaluate(&x.scale(c), c.abs() * a).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12);
    }

    #[test]
    fn induced_norms_pass_the_axioms(k in kind(), p in plan()) {
        let n = FuzzyNorm::crisp_induced(k, 3).unwrap();
        let report = check_axioms(&n, &p).unwrap();
        prop_assert!(report.passed(), "{:?}", report.witnesses.first());
    }

    #[test]
    fn literal_strict_convexity_always_fails(p in plan(), dim in 1usize..5) {
        let n = FuzzyNorm::crisp_induced(CrispNormKind::Euclidean, dim).unwrap();
        let report = check_strict_convexity(&n, &p).unwrap();
        prop_assert!(!report.passed());
        let ctx = ReplayContext { norm: Some(&n), ..Default::default() };
        for w in &report.witnesses {
            prop_assert!(replay(w, &ctx).unwrap().reproduced());
        }
    }

    #[test]
    fn broken_norm_witnesses_replay(seed in any::<u64>(), dim in 1usize..4) {
        let n = FuzzyNorm::named("squared", CrispNormKind::MaxNorm, dim).unwrap();
        let report = check_axioms(&n, &SamplePlan { n_points: 30, ..SamplePlan::with_seed(seed) }).unwrap();
        prop_assert!(!report.passed());
        let ctx = ReplayContext { norm: Some(&n), ..Default::default() };
        for w in &report.witnesses {
            prop_assert!(replay(w, &ctx).unwrap().reproduced(), "{:?}", w);
        }
    }

    #[test]
    fn isometry_probe_symmetric(seed in any::<u64>(), x in vector(2, 3.0), y in vector(2, 3.0), a in 1e-2f64..1e2) {
        let n = FuzzyNorm::crisp_induced(CrispNormKind::Euclidean, 2).unwrap();
        let f = make_perturbed_isometry(seed, 2, 0.2).unwrap();
        let xy = probe_isometry(&n, &n, &f, &x, &y, a, 1e-9).unwrap();
        let yx = probe_isometry(&n, &n, &f, &y, &x, a, 1e-9).unwrap();
        prop_assert_eq!(xy.is_some(), yx.is_some());
    }

    #[test]
    fn rigid_maps_are_fuzzy_isometries(seed in any::<u64>(), dim in 1usize..7, p in plan()) {
        let n = FuzzyNorm::crisp_induced(CrispNormKind::Euclidean, dim).unwrap();
        let f = make_rigid_map(seed, dim, Vector::basis(dim, 0).scale(3.0)).unwrap();
        prop_assert!(check_isometry(&n, &n, &f, &p).unwrap().passed());
    }

    #[test]
    fn orthogonal_factor_is_orthogonal(seed in any::<u64>(), dim in 1usize..9) {
        let q = random_orthogonal(seed, dim).unwrap();
        let defect = (q.transpose() * &q - DMatrix::<f64>::identity(dim, dim)).amax();
        prop_assert!(defect <= 1e-12);
    }

    #[test]
    fn midpoint_verification_is_s_invariant(
        k in kind(), a in vector(3, 3.0), b in vector(3, 3.0), x in vector(3, 3.0),
        s in 1e-2f64..1e2, s2 in 1e-2f64..1e2,
    ) {
        let n = FuzzyNorm::crisp_induced(k, 3).unwrap();
        let p1 = MidpointProblem::new(n, a.clone(), b.clone(), s).unwrap();
        let p2 = p1.with_s(s2).unwrap();
        let m = a.midpoint(&b).unwrap();
        prop_assert!(verify_midpoint(&p1, &m, 1e-12).unwrap());
        prop_assert!(verify_midpoint(&p2, &m, 1e-12).unwrap());
        // Both scales reject any point whose crisp distances miss half the
        // gap by a visible margin.
        let k = p1.space().crisp_kind().unwrap();
        let half = 0.5 * crisp_norm(&a.sub(&b).unwrap(), k).unwrap();
        let da = crisp_norm(&a.sub(&x).unwrap(), k).unwrap();
        let db = crisp_norm(&b.sub(&x).unwrap(), k).unwrap();
        if (da - half).abs().max((db - half).abs()) > 1e-6 {
            prop_assert!(!verify_midpoint(&p1, &x, 1e-12).unwrap());
            prop_assert!(!verify_midpoint(&p2, &x, 1e-12).unwrap());
        }
    }

    #[test]
    fn min_inequalities_hold_on_max_norm_segment(t1 in -1.0f64..1.0, t2 in -1.0f64..1.0, s in 0.1f64..10.0) {
        let n = FuzzyNorm::crisp_induced(CrispNormKind::MaxNorm, 2).unwrap();
        let prob = MidpointProblem::new(n, Vector::zeros(2), Vector::basis(2, 0).scale(2.0), s).unwrap();
        let (u, w) = (Vector::new(vec![1.0, t1]).unwrap(), Vector::new(vec![1.0, t2]).unwrap());
        let r = check_min_inequalities(&prob, &u, &w, 1e-12).unwrap();
        prop_assert!(r.holds_a && r.holds_b);
    }

    #[test]
    fn normalized_map_fixes_origin(seed in any::<u64>(), dim in 1usize..6, t in vector(1, 50.0)) {
        let shift = Vector::basis(dim, 0).scale(t.coords()[0]);
        for f in [make_rigid_map(seed, dim, shift.clone()).unwrap(), make_perturbed_isometry(seed, dim, 0.3).unwrap()] {
            let h = normalize(&f).unwrap();
            prop_assert!(h.apply(&Vector::zeros(dim)).unwrap().is_zero());
        }
    }

    #[test]
    fn additivity_witness_implies_midpoint_witness(seed in any::<u64>(), magnitude in 0.05f64..1.0) {
        let n = FuzzyNorm::crisp_induced(CrispNormKind::Euclidean, 2).unwrap();
        let h = normalize(&make_perturbed_isometry(seed, 2, magnitude).unwrap()).unwrap();
        let tol = 1e-9;
        let report = check_q_linearity(&h, &n, &SamplePlan { n_points: 40, ..SamplePlan::with_seed(seed) }, 3, tol).unwrap();
        for w in report.witnesses_for("additivity") {
            let WitnessData::Additivity { a, b, .. } = &w.data else { unreachable!() };
            let direct = probe_midpoint_preservation(&h, &n, a, b, tol / 4.0).unwrap();
            let halved = probe_midpoint_preservation(&h, &n, &a.add(b).unwrap(), &Vector::zeros(2), tol / 4.0).unwrap();
            prop_assert!(direct.is_some() || halved.is_some());
        }
    }

    #[test]
    fn fit_recovers_exact_affine_maps(seed in any::<u64>(), dom in 1usize..5, cod in 1usize..5) {
        let mut s = fuzzynorm::sampling::Sampler::new(seed);
        let l = DMatrix::from_fn(cod, dom, |_, _| s.uniform(-2.0, 2.0));
        let b = Vector::new((0..cod).map(|_| s.uniform(-5.0, 5.0)).collect()).unwrap();
        let f = MapSpec::affine("affine", l.clone(), b.clone()).unwrap();
        let fit = fit_affine(&f, &SamplePlan::with_seed(seed), &CrispNormKind::Euclidean).unwrap();
        prop_assert!(fit.residual <= 1e-8);
        let scale = l.amax().max(1.0);
        prop_assert!((fit.linear_matrix() - &l).amax() <= 1e-6 * scale);
        prop_assert!(fit.offset.max_abs_diff(&b).unwrap() <= 1e-6 * b.coords().iter().fold(1.0f64, |m, c| m.max(c.abs())));
        prop_assert!((fit.recompute_residual().unwrap() - fit.residual).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn euclidean_midpoints_unique(a in vector(3, 4.0), b in vector(3, 4.0), s in 0.1f64..10.0, seed in any::<u64>()) {
        prop_assume!(a.max_abs_diff(&b).unwrap() > 1e-3);
        let n = FuzzyNorm::crisp_induced(CrispNormKind::Euclidean, 3).unwrap();
        let prob = MidpointProblem::new(n, a.clone(), b.clone(), s).unwrap();
        let sol = find_midpoints(&prob, &SamplePlan { n_starts: 16, ..SamplePlan::with_seed(seed) }).unwrap();
        prop_assert!(sol.unique_within_probe);
        prop_assert!(sol.solutions[0].max_abs_diff(&a.midpoint(&b).unwrap()).unwrap() <= 1e-6);
    }

    #[test]
    fn max_norm_midpoints_multiple(a in vector(2, 4.0), b in vector(2, 4.0), seed in any::<u64>()) {
        let d = a.sub(&b).unwrap();
        // Generic position: the two coordinate gaps differ noticeably.
        prop_assume!((d.coords()[0].abs() - d.coords()[1].abs()).abs() > 0.1 * d.coords()[0].abs().max(d.coords()[1].abs()));
        let n = FuzzyNorm::crisp_induced(CrispNormKind::MaxNorm, 2).unwrap();
        let prob = MidpointProblem::new(n, a, b, 1.0).unwrap();
        let sol = find_midpoints(&prob, &SamplePlan::with_seed(seed)).unwrap();
        prop_assert!(sol.solutions.len() >= 2, "{:?}", sol);
    }

    #[test]
    fn isometries_preserving_collinearity_are_certified(seed in any::<u64>(), dim in 1usize..=8) {
        let n = FuzzyNorm::crisp_induced(CrispNormKind::Euclidean, dim).unwrap();
        let f = make_rigid_map(seed, dim, Vector::basis(dim, dim - 1).scale(-2.0)).unwrap();
        let plan = SamplePlan { n_points: 60, ..SamplePlan::with_seed(seed) };
        prop_assume!(check_isometry(&n, &n, &f, &plan).unwrap().passed());
        prop_assume!(check_collinearity_preservation(&f, &plan, 1e-9).unwrap().passed());
        let cert = certify_affine(&f, &n, &n, &plan, &CertifyOptions::default()).unwrap();
        prop_assert_eq!(cert.verdict, CertificateVerdict::CertifiedAffine);
        prop_assert!(cert.fit.unwrap().residual <= 1e-6);
    }
}

#[test]
fn convergent_shipped_sequences_are_cauchy() {
    let n = FuzzyNorm::crisp_induced(CrispNormKind::Euclidean, 2).unwrap();
    let e1 = Vector::basis(2, 0);
    let base = Vector::new(vec![0.25, -0.5]).unwrap();
    let cases = [
        (SequenceSpec::drift(base.clone(), e1.clone(), 1000).unwrap(), base.clone()),
        (SequenceSpec::constant(base.clone(), 1000).unwrap(), base.clone()),
        (SequenceSpec::alternating(e1.clone(), 1000).unwrap(), Vector::zeros(2)),
    ];
    for (seq, limit) in &cases {
        for eps in [0.1, 0.01] {
            let grid = [0.5, 1.0, 10.0];
            let conv = check_convergence(&n, seq, limit, eps, &grid).unwrap();
            let cauchy = check_cauchy(&n, seq, eps, &grid, 10).unwrap();
            assert!(!conv.passed() || cauchy.passed(), "{} eps={eps}", seq.label());
        }
    }
}

#[test]
fn sine_curve_certificate_witnesses_replay() {
    let dom = FuzzyNorm::crisp_induced(CrispNormKind::Euclidean, 1).unwrap();
    let cod = FuzzyNorm::crisp_induced(CrispNormKind::MaxNorm, 2).unwrap();
    let f = make_sine_curve_map();
    let plan = SamplePlan { point_radius: PI, ..SamplePlan::default() };
    let cert = certify_affine(&f, &dom, &cod, &plan, &CertifyOptions::default()).unwrap();
    assert_eq!(cert.verdict, CertificateVerdict::Refuted);
    let ctx = ReplayContext { norm: Some(&dom), codomain: Some(&cod), map: Some(&f), ..Default::default() };
    let mut count = 0;
    for report in cert.reports() {
        for w in &report.witnesses {
            assert!(replay(w, &ctx).unwrap().reproduced(), "{w:?}");
            count += 1;
        }
    }
    assert!(count > 0);
}

#[test]
fn strict_convexity_witness_shape() {
    let n = FuzzyNorm::crisp_induced(CrispNormKind::Euclidean, 2).unwrap();
    let x = Vector::new(vec![1.0, 0.0]).unwrap();
    let w = probe_strict_convexity(&n, &x, &x.scale(2.0), 1.0, 2.0, 1e-9).unwrap();
    assert!(w.is_some());
}
