//! Expected values computed by routes independent of the library code paths.

use std::f64::consts::PI;

use fuzzynorm::geometry::{find_midpoints, verify_midpoint};
use fuzzynorm::isometry::make_sine_curve_map;
use fuzzynorm::mazur_ulam::fit_affine;
use fuzzynorm::{CrispNormKind, FuzzyNorm, MidpointProblem, SamplePlan, Vector};

fn v(c: &[f64]) -> Vector {
    Vector::new(c.to_vec()).unwrap()
}

/// `a / (a + r)` written out by hand.
fn induced(a: f64, r: f64) -> f64 {
    if a <= 0.0 {
        0.0
    } else {
        a / (a + r)
    }
}

#[test]
fn evaluation_examples_match_hand_formula() {
    let n = FuzzyNorm::crisp_induced(CrispNormKind::Euclidean, 2).unwrap();
    for (x, a) in [([1.0, 0.0], 1.0), ([3.0, 4.0], 2.5), ([0.0, 0.0], 1.0), ([1.0, 0.0], -1.0)] {
        let r = (x[0] * x[0] + x[1] * x[1]) as f64;
        assert_eq!(n.evaluate(&v(&x), a).unwrap(), induced(a, r.sqrt()));
    }
}

/// Dense grid scan of the Euclidean midpoint residual over `[-1, 3]²`: the
/// near-zero cells form a single basin at `(1, 0)`, which is also the only
/// solution the solver reports.
#[test]
fn euclidean_midpoint_single_basin() {
    let target = induced(2.0, 2.0);
    let residual = |x: f64, y: f64| {
        let ra = (x * x + y * y).sqrt();
        let rb = ((x - 2.0).powi(2) + y * y).sqrt();
        (induced(1.0, ra) - target).abs().max((induced(1.0, rb) - target).abs())
    };
    let steps = 801;
    let h = 4.0 / (steps - 1) as f64;
    let mut hits = Vec::new();
    for i in 0..steps {
        for j in 0..steps {
            let (x, y) = (-1.0 + i as f64 * h, -1.0 + j as f64 * h);
            if residual(x, y) < 1e-3 {
                hits.push((x, y));
            }
        }
    }
    assert!(!hits.is_empty());
    for (x, y) in &hits {
        assert!((x - 1.0).abs() < 0.05 && y.abs() < 0.1, "stray basin at ({x}, {y})");
    }

    let n = FuzzyNorm::crisp_induced(CrispNormKind::Euclidean, 2).unwrap();
    let prob = MidpointProblem::new(n, v(&[0.0, 0.0]), v(&[2.0, 0.0]), 1.0).unwrap();
    let sol = find_midpoints(&prob, &SamplePlan::default()).unwrap();
    assert_eq!(sol.solutions, vec![v(&[1.0, 0.0])]);
    assert!(sol.unique_within_probe);
}

/// Every `(1, t)` with `|t| ≤ 1` is at max-distance 1 from both endpoints, so
/// it solves the equations exactly.
#[test]
fn max_norm_midpoint_segment() {
    let target = induced(2.0, 2.0);
    let n = FuzzyNorm::crisp_induced(CrispNormKind::MaxNorm, 2).unwrap();
    let prob = MidpointProblem::new(n, v(&[0.0, 0.0]), v(&[2.0, 0.0]), 1.0).unwrap();
    assert_eq!(prob.target().unwrap(), target);
    for k in -8..=8 {
        let t = k as f64 / 8.0;
        let by_hand = (induced(1.0, 1f64.max(t.abs())) - target).abs();
        assert_eq!(by_hand, 0.0);
        assert!(verify_midpoint(&prob, &v(&[1.0, t]), 0.0).unwrap());
    }
    assert!(verify_midpoint(&prob, &v(&[1.0, 0.75]), 0.0).unwrap());
    assert!(!verify_midpoint(&prob, &v(&[1.0, 1.5]), 1e-9).unwrap());
}

/// The affine fit of `t ↦ (t, sin t)` on `[-π, π]`, checked against a
/// hand-rolled simple linear regression on the same sample.
#[test]
fn sine_curve_fit_matches_regression_oracle() {
    let plan = SamplePlan {
        point_radius: PI,
        ..SamplePlan::default()
    };
    let fit = fit_affine(&make_sine_curve_map(), &plan, &CrispNormKind::MaxNorm).unwrap();
    let ts: Vec<f64> = fit.sample.iter().map(|x| x.coords()[0]).collect();
    let n = ts.len() as f64;
    let mean_t = ts.iter().sum::<f64>() / n;
    let mean_s = ts.iter().map(|t| t.sin()).sum::<f64>() / n;
    let cov: f64 = ts.iter().map(|t| (t - mean_t) * (t.sin() - mean_s)).sum();
    let var: f64 = ts.iter().map(|t| (t - mean_t).powi(2)).sum();
    let slope = cov / var;
    let intercept = mean_s - slope * mean_t;
    let oracle_residual = ts
        .iter()
        .map(|t| (t.sin() - (slope * t + intercept)).abs())
        .fold(0.0, f64::max);

    assert!((fit.linear_part[1][0] - slope).abs() < 1e-9);
    assert!((fit.offset.coords()[1] - intercept).abs() < 1e-9);
    assert!((fit.linear_part[0][0] - 1.0).abs() < 1e-9);
    assert!((fit.residual - oracle_residual).abs() < 1e-9);
    assert!(fit.residual >= 0.5, "residual {}", fit.residual);
    // Continuous least-squares slope is 3/π²; the sample should be close.
    assert!((slope - 3.0 / (PI * PI)).abs() < 0.05);
}
