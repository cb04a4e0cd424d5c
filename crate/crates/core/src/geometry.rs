//! Collinearity and the metric-midpoint equations
//! `N(a - x, s) = N(b - x, s) = N(a - b, 2s)`.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::error::{domain, structural, Error, Result};
use crate::fuzzy_norm::FuzzyNorm;
use crate::sampling::SamplePlan;
use crate::search::{nelder_mead, NelderMeadOptions};
use crate::vecspace::{check_same_dim, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Collinearity {
    pub collinear: bool,
    /// Least-squares `t` in `y - z = t (x - z)`; absent in the degenerate case.
    pub t: Option<f64>,
    /// `‖(y - z) - t (x - z)‖₂`, or `‖y - z‖₂` when `x = z`.
    pub residual: f64,
}

/// Is `y - z = t (x - z)` for some real `t`, up to `tol`?
///
/// If `‖x - z‖ ≤ tol` the line is undetermined and the triple counts as
/// collinear iff `‖y - z‖ ≤ tol`.
pub fn collinear(x: &Vector, y: &Vector, z: &Vector, tol: f64) -> Result<Collinearity> {
    check_same_dim(x, y)?;
    check_same_dim(x, z)?;
    let d = x.sub(z)?;
    let e = y.sub(z)?;
    let dd = d.dot(&d)?;
    if dd.sqrt() <= tol {
        let residual = e.dot(&e)?.sqrt();
        return Ok(Collinearity {
            collinear: residual <= tol,
            t: None,
            residual,
        });
    }
    let t = e.dot(&d)? / dd;
    let r = e.sub(&d.scale(t))?;
    let residual = r.dot(&r)?.sqrt();
    Ok(Collinearity {
        collinear: residual <= tol,
        t: (residual <= tol).then_some(t),
        residual,
    })
}

/// Find `x` with `N(a - x, s) = N(b - x, s) = N(a - b, 2s)`.
#[derive(Debug, Clone)]
pub struct MidpointProblem {
    space: FuzzyNorm,
    a: Vector,
    b: Vector,
    s: f64,
}

impl MidpointProblem {
    pub fn new(space: FuzzyNorm, a: Vector, b: Vector, s: f64) -> Result<Self> {
        if a.dim() != space.dimension() || b.dim() != space.dimension() {
            return Err(structural(format!(
                "endpoints must have dimension {}",
                space.dimension()
            )));
        }
        if !(s.is_finite() && s > 0.0) {
            return Err(domain(format!("s must be positive, got {s}")));
        }
        Ok(Self { space, a, b, s })
    }

    pub fn space(&self) -> &FuzzyNorm {
        &self.space
    }

    pub fn a(&self) -> &Vector {
        &self.a
    }

    pub fn b(&self) -> &Vector {
        &self.b
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn with_s(&self, s: f64) -> Result<Self> {
        Self::new(self.space.clone(), self.a.clone(), self.b.clone(), s)
    }

    /// `N(a - b, 2s)`.
    pub fn target(&self) -> Result<f64> {
        self.space.evaluate(&self.a.sub(&self.b)?, 2.0 * self.s)
    }

    /// Larger of the two absolute equation defects at `x`.
    pub fn residual(&self, x: &Vector) -> Result<f64> {
        let target = self.target()?;
        let da = self.space.evaluate(&self.a.sub(x)?, self.s)? - target;
        let db = self.space.evaluate(&self.b.sub(x)?, self.s)? - target;
        Ok(da.abs().max(db.abs()))
    }

    /// Distinct solutions must be further apart than this (max-abs distance).
    pub fn distinctness_threshold(&self) -> f64 {
        1e-2 * self.a.max_abs_diff(&self.b).unwrap_or(0.0)
    }
}

pub fn verify_midpoint(prob: &MidpointProblem, x: &Vector, tol: f64) -> Result<bool> {
    Ok(prob.residual(x)? <= tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MidpointSolution {
    pub solutions: Vec<Vector>,
    pub residuals: Vec<f64>,
    pub unique_within_probe: bool,
    pub starts: usize,
    /// Starts whose local search ended above the acceptance tolerance.
    pub discarded_starts: usize,
}

/// Collects solutions of the midpoint equations: the arithmetic midpoint when
/// it verifies, then whatever a seeded multi-start Nelder–Mead search finds in
/// the ball of radius `2‖a - b‖` around it. Solutions closer than
/// [`MidpointProblem::distinctness_threshold`] to an earlier one are merged.
pub fn find_midpoints(prob: &MidpointProblem, plan: &SamplePlan) -> Result<MidpointSolution> {
    plan.validate()?;
    let tol = plan.equality_tol;
    if prob.a == prob.b {
        let residual = prob.residual(&prob.a)?;
        return Ok(MidpointSolution {
            solutions: vec![prob.a.clone()],
            residuals: vec![residual],
            unique_within_probe: true,
            starts: 0,
            discarded_starts: 0,
        });
    }

    let center = prob.a.midpoint(&prob.b)?;
    let diff = prob.a.sub(&prob.b)?;
    let radius = 2.0 * diff.dot(&diff)?.sqrt();
    let threshold = prob.distinctness_threshold();

    let mut solutions: Vec<Vector> = Vec::new();
    let mut residuals = Vec::new();
    let mut accept = |x: Vector, r: f64| -> Result<()> {
        for s in &solutions {
            if s.max_abs_diff(&x)? <= threshold {
                return Ok(());
            }
        }
        solutions.push(x);
        residuals.push(r);
        Ok(())
    };

    let r = prob.residual(&center)?;
    if r <= tol {
        accept(center.clone(), r)?;
    }

    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let objective = |coords: &[f64]| -> f64 {
        match prob.residual(&Vector::from_raw(coords.to_vec())) {
            Ok(r) => r,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::INFINITY
            }
        }
    };
    let opts = NelderMeadOptions {
        initial_step: 0.1 * radius,
        f_target: 1e-3 * tol,
        x_tol: 1e-14 * radius,
        ..NelderMeadOptions::default()
    };
    let mut sampler = plan.sampler();
    let mut discarded = 0;
    for _ in 0..plan.n_starts {
        let start = sampler.point_around(&center, radius);
        let m = nelder_mead(&objective, start.coords(), &opts);
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        let x = Vector::new(m.x)?;
        let r = prob.residual(&x)?;
        if r <= tol {
            accept(x, r)?;
        } else {
            discarded += 1;
        }
    }

    let unique = solutions.len() == 1;
    Ok(MidpointSolution {
        solutions,
        residuals,
        unique_within_probe: unique,
        starts: plan.n_starts,
        discarded_starts: discarded,
    })
}

/// Both sides of `N(a - (u+v)/2, s) ≥ min{N(a - u, s), N(a - v, s)}` and the
/// matching inequality for `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinInequalityReport {
    pub midpoint: Vector,
    pub lhs_a: f64,
    pub rhs_a: f64,
    pub holds_a: bool,
    pub lhs_b: f64,
    pub rhs_b: f64,
    pub holds_b: bool,
}

impl MinInequalityReport {
    /// Which of the two inequalities is tight at `tol`.
    pub fn equalities(&self, tol: f64) -> (bool, bool) {
        ((self.lhs_a - self.rhs_a).abs() <= tol, (self.lhs_b - self.rhs_b).abs() <= tol)
    }
}

/// Evaluates the two min-inequalities for midpoint solutions `u, v`. A
/// failing inequality means the norm breaks N4 and is reported as a contract
/// violation.
pub fn check_min_inequalities(
    prob: &MidpointProblem,
    u: &Vector,
    v: &Vector,
    tol: f64,
) -> Result<MinInequalityReport> {
    for (name, p) in [("u", u), ("v", v)] {
        if !verify_midpoint(prob, p, tol)? {
            return Err(domain(format!("{name} = {p} does not solve the midpoint equations")));
        }
    }
    let n = &prob.space;
    let s = prob.s;
    let midpoint = u.midpoint(v)?;
    let side = |end: &Vector| -> Result<(f64, f64)> {
        let lhs = n.evaluate(&end.sub(&midpoint)?, s)?;
        let rhs = n.evaluate(&end.sub(u)?, s)?.min(n.evaluate(&end.sub(v)?, s)?);
        Ok((lhs, rhs))
    };
    let (lhs_a, rhs_a) = side(&prob.a)?;
    let (lhs_b, rhs_b) = side(&prob.b)?;
    let report = MinInequalityReport {
        midpoint,
        lhs_a,
        rhs_a,
        holds_a: lhs_a >= rhs_a - tol,
        lhs_b,
        rhs_b,
        holds_b: lhs_b >= rhs_b - tol,
    };
    if !(report.holds_a && report.holds_b) {
        return Err(crate::error::contract(format!(
            "min-inequality fails for `{}` at u = {u}, v = {v}: {report:?}",
            n.label()
        )));
    }
    Ok(report)
}
