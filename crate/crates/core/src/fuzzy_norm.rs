//! Fuzzy norms `N(x, a)`, the axiom checkers for N1–N6 and the literal
//! strict-convexity checker.

use std::fmt;
use std::sync::Arc;

use crate::error::{contract, domain, structural, Result};
use crate::report::{CheckReport, ReportBuilder, WitnessData};
use crate::sampling::{anchor_points, SamplePlan};
use crate::vecspace::{CrispNormKind, Vector};

/// User-supplied `N(x, a)`. Must be total; values outside `[0, 1]` are
/// reported as contract violations.
pub type Evaluator = Arc<dyn Fn(&Vector, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum NormFamily {
    /// `a / (a + ‖x‖)` for `a > 0`, else 0.
    CrispInduced(CrispNormKind),
    Custom { label: String, evaluator: Evaluator },
}

impl fmt::Debug for NormFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormFamily::CrispInduced(kind) => f.debug_tuple("CrispInduced").field(kind).finish(),
            NormFamily::Custom { label, .. } => f.debug_struct("Custom").field("label", label).finish(),
        }
    }
}

/// An evaluable fuzzy norm on a space of fixed dimension.
#[derive(Debug, Clone)]
pub struct FuzzyNorm {
    family: NormFamily,
    dimension: usize,
}

/// Names accepted by [`FuzzyNorm::named`].
pub const NAMED_FAMILIES: &[&str] = &[
    "crisp_induced",
    "squared",
    "exponential",
    "step",
    "strict_step",
    "out_of_range",
];

impl FuzzyNorm {
    pub fn crisp_induced(kind: CrispNormKind, dimension: usize) -> Result<Self> {
        kind.validate(dimension)?;
        Ok(Self {
            family: NormFamily::CrispInduced(kind),
            dimension,
        })
    }

    pub fn custom(label: impl Into<String>, dimension: usize, evaluator: Evaluator) -> Result<Self> {
        if dimension == 0 {
            return Err(structural("dimension must be at least 1"));
        }
        Ok(Self {
            family: NormFamily::Custom {
                label: label.into(),
                evaluator,
            },
            dimension,
        })
    }

    /// Shipped families built on top of a crisp norm:
    ///
    /// * `crisp_induced`: `a / (a + ‖x‖)`
    /// * `squared`: `a / (a + ‖x‖²)`, breaks N3
    /// * `exponential`: `exp(-‖x‖ / a)`, a valid fuzzy norm
    /// * `step`: 1 if `a ≥ ‖x‖`, else 0, a valid fuzzy norm
    /// * `strict_step`: 1 if `a > ‖x‖`, else 0, breaks N6
    /// * `out_of_range`: `2a / (a + ‖x‖)`, leaves `[0, 1]`
    pub fn named(name: &str, kind: CrispNormKind, dimension: usize) -> Result<Self> {
        kind.validate(dimension)?;
        if name == "crisp_induced" {
            return Self::crisp_induced(kind, dimension);
        }
        let k = kind.clone();
        let norm = move |x: &Vector| k.eval(x.coords());
        let evaluator: Evaluator = match name {
            "squared" => Arc::new(move |x, a| if a > 0.0 { a / (a + norm(x).powi(2)) } else { 0.0 }),
            "exponential" => Arc::new(move |x, a| if a > 0.0 { (-norm(x) / a).exp() } else { 0.0 }),
            "step" => Arc::new(move |x, a| if a > 0.0 && a >= norm(x) { 1.0 } else { 0.0 }),
            "strict_step" => Arc::new(move |x, a| if a > 0.0 && a > norm(x) { 1.0 } else { 0.0 }),
            "out_of_range" => Arc::new(move |x, a| if a > 0.0 { 2.0 * a / (a + norm(x)) } else { 0.0 }),
            other => {
                return Err(domain(format!(
                    "unknown fuzzy norm family `{other}` (expected one of {})",
                    NAMED_FAMILIES.join(", ")
                )))
            }
        };
        Self::custom(format!("{name}[{}]", kind.label()), dimension, evaluator)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn family(&self) -> &NormFamily {
        &self.family
    }

    /// The underlying crisp norm for crisp-induced families.
    pub fn crisp_kind(&self) -> Option<&CrispNormKind> {
        match &self.family {
            NormFamily::CrispInduced(kind) => Some(kind),
            NormFamily::Custom { .. } => None,
        }
    }

    pub fn label(&self) -> String {
        match &self.family {
            NormFamily::CrispInduced(kind) => format!("crisp_induced[{}]", kind.label()),
            NormFamily::Custom { label, .. } => label.clone(),
        }
    }

    /// `N(x, a)`.
    pub fn evaluate(&self, x: &Vector, a: f64) -> Result<f64> {
        if x.dim() != self.dimension {
            return Err(structural(format!(
                "vector of dimension {} evaluated in a space of dimension {}",
                x.dim(),
                self.dimension
            )));
        }
        if a.is_nan() {
            return Err(domain("threshold is NaN"));
        }
        match &self.family {
            NormFamily::CrispInduced(kind) => {
                if a <= 0.0 {
                    return Ok(0.0);
                }
                if a == f64::INFINITY {
                    return Ok(1.0);
                }
                Ok(a / (a + kind.eval(x.coords())))
            }
            NormFamily::Custom { label, evaluator } => {
                let value = evaluator(x, a);
                if !(0.0..=1.0).contains(&value) {
                    return Err(contract(format!(
                        "fuzzy norm `{label}` returned {value} outside [0, 1] at x = {x}, a = {a}"
                    )));
                }
                Ok(value)
            }
        }
    }
}

// Per-sample probes. Each returns the witness it would record, so replaying a
// witness is just calling the probe again on the recorded inputs.

pub fn probe_n1(n: &FuzzyNorm, x: &Vector, a: f64, tol: f64) -> Result<Option<WitnessData>> {
    let value = n.evaluate(x, a)?;
    Ok((a <= 0.0 && value > tol).then(|| WitnessData::NonPositiveThreshold {
        x: x.clone(),
        a,
        value,
    }))
}

pub fn probe_n2_zero(n: &FuzzyNorm, a: f64, tol: f64) -> Result<Option<WitnessData>> {
    let x = Vector::zeros(n.dimension());
    let value = n.evaluate(&x, a)?;
    Ok((a > 0.0 && (value - 1.0).abs() > tol).then_some(WitnessData::ZeroNotOne { x, a, value }))
}

pub fn probe_n2_nonzero(
    n: &FuzzyNorm,
    x: &Vector,
    thresholds: &[f64],
    tol: f64,
) -> Result<Option<WitnessData>> {
    if x.is_zero() {
        return Ok(None);
    }
    let mut min_value = f64::INFINITY;
    for &a in thresholds {
        min_value = min_value.min(n.evaluate(x, a)?);
    }
    Ok((min_value >= 1.0 - tol).then(|| WitnessData::NonzeroAlwaysOne {
        x: x.clone(),
        thresholds: thresholds.to_vec(),
        min_value,
    }))
}

pub fn probe_n3(n: &FuzzyNorm, x: &Vector, scalar: f64, b: f64, tol: f64) -> Result<Option<WitnessData>> {
    if scalar == 0.0 {
        return Err(domain("N3 needs a nonzero scalar"));
    }
    let scaled_value = n.evaluate(&x.scale(scalar), b)?;
    let rescaled_value = n.evaluate(x, b / scalar.abs())?;
    Ok(((scaled_value - rescaled_value).abs() > tol).then(|| WitnessData::Scaling {
        x: x.clone(),
        scalar,
        b,
        scaled_value,
        rescaled_value,
    }))
}

pub fn probe_n4(
    n: &FuzzyNorm,
    x: &Vector,
    y: &Vector,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<Option<WitnessData>> {
    let sum_value = n.evaluate(&x.add(y)?, a + b)?;
    let min_value = n.evaluate(x, a)?.min(n.evaluate(y, b)?);
    Ok((sum_value < min_value - tol).then(|| WitnessData::MinTriangle {
        x: x.clone(),
        y: y.clone(),
        a,
        b,
        sum_value,
        min_value,
    }))
}

pub fn probe_n5_monotone(
    n: &FuzzyNorm,
    x: &Vector,
    a_lo: f64,
    a_hi: f64,
    tol: f64,
) -> Result<Option<WitnessData>> {
    let value_lo = n.evaluate(x, a_lo)?;
    let value_hi = n.evaluate(x, a_hi)?;
    Ok((a_lo <= a_hi && value_hi < value_lo - tol).then(|| WitnessData::Decreasing {
        x: x.clone(),
        a_lo,
        a_hi,
        value_lo,
        value_hi,
    }))
}

pub fn probe_n5_limit(n: &FuzzyNorm, x: &Vector, a_big: f64, limit_tol: f64) -> Result<Option<WitnessData>> {
    let value = n.evaluate(x, a_big)?;
    Ok((value < 1.0 - limit_tol).then(|| WitnessData::NoLimit {
        x: x.clone(),
        a_big,
        value,
    }))
}

/// One-sided probe offsets `10^-k`, `k = 3..=9`.
pub const N6_OFFSETS: [f64; 7] = [1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9];

/// Estimates `limsup_{t→a} N(x, t)` from one-sided probes and flags the
/// threshold when the value falls below it.
///
/// Each side's limit is extrapolated linearly from its two closest probes,
/// which cancels the first-order slope of a continuous `N(x, ·)` while a jump
/// survives intact.
pub fn probe_n6(n: &FuzzyNorm, x: &Vector, a: f64, tol: f64) -> Result<Option<WitnessData>> {
    if x.is_zero() {
        return Ok(None);
    }
    let value = n.evaluate(x, a)?;
    let mut limsup_estimate = f64::NEG_INFINITY;
    for side in [1.0, -1.0] {
        let mut probes = [0.0; N6_OFFSETS.len()];
        for (p, h) in probes.iter_mut().zip(N6_OFFSETS) {
            *p = n.evaluate(x, a + side * h)?;
        }
        let (far, near) = (probes[probes.len() - 2], probes[probes.len() - 1]);
        let extrapolated = near - (far - near) / 9.0;
        limsup_estimate = limsup_estimate.max(extrapolated);
    }
    Ok((value < limsup_estimate - tol).then(|| WitnessData::NotUpperSemicontinuous {
        x: x.clone(),
        a,
        value,
        limsup_estimate,
    }))
}

/// Threshold for the N5 limit probe: `10^6` times the larger of the top of
/// `a_range` and ten sampling radii.
pub fn limit_threshold(plan: &SamplePlan) -> f64 {
    1e6 * plan.a_range.1.max(10.0 * plan.point_radius)
}

/// Extra small thresholds used when looking for a value below 1 at `x ≠ 0`.
fn small_thresholds() -> impl Iterator<Item = f64> {
    (0..=12).map(|k| 10f64.powi(-k))
}

/// Samples the six axioms. Every clause is falsification-only: a pass means
/// no sampled input violated it.
pub fn check_axioms(n: &FuzzyNorm, plan: &SamplePlan) -> Result<CheckReport> {
    plan.validate()?;
    let tol = plan.equality_tol;
    let dim = n.dimension();
    let grid = plan.thresholds();
    let mut sampler = plan.sampler();
    let mut points = anchor_points(dim, plan.point_radius);
    let n_anchors = points.len();
    points.extend(sampler.points(dim, plan.point_radius, plan.n_points));

    let mut rb = ReportBuilder::new();
    let n1 = rb.clause("N1", tol);
    let n2 = rb.clause("N2", tol);
    let n3 = rb.clause("N3", tol);
    let n4 = rb.clause("N4", tol);
    let n5 = rb.clause("N5", tol);
    let n6 = rb.clause("N6", tol);

    for x in &points {
        rb.record(n1, probe_n1(n, x, 0.0, tol)?);
        for &a in &grid {
            rb.record(n1, probe_n1(n, x, -a, tol)?);
        }
    }

    for &a in &grid {
        rb.record(n2, probe_n2_zero(n, a, tol)?);
    }
    let mut n2_grid: Vec<f64> = grid.iter().copied().chain(small_thresholds()).collect();
    n2_grid.sort_by(f64::total_cmp);
    for x in points.iter().filter(|x| !x.is_zero()) {
        rb.record(n2, probe_n2_nonzero(n, x, &n2_grid, tol)?);
    }

    for x in &points {
        let random_scalar = sampler.log_uniform(0.1, 10.0);
        let sign = if sampler.uniform(0.0, 1.0) < 0.5 { -1.0 } else { 1.0 };
        for scalar in [-1.0, 2.0, 0.5, sign * random_scalar] {
            for &b in &grid {
                rb.record(n3, probe_n3(n, x, scalar, b, tol)?);
            }
        }
    }

    let m = points.len();
    for i in 0..m {
        let (x, y) = (&points[i], &points[(i + 1) % m]);
        for j in 0..grid.len() {
            for k in 0..grid.len().min(3) {
                let (a, b) = (grid[j], grid[(j + k) % grid.len()]);
                rb.record(n4, probe_n4(n, x, y, a, b, tol)?);
            }
        }
    }

    let a_big = limit_threshold(plan);
    for x in &points {
        for w in grid.windows(2) {
            rb.record(n5, probe_n5_monotone(n, x, w[0], w[1], tol)?);
        }
        let outcome = probe_n5_limit(n, x, a_big, plan.limit_tol)?;
        rb.record_at(n5, plan.limit_tol, outcome);
    }

    for (i, x) in points.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for &a in &grid {
            rb.record(n6, probe_n6(n, x, a, tol)?);
        }
        // Axis anchors have crisp length exactly `point_radius`; probing there
        // catches jumps sitting at the norm itself.
        if i < n_anchors {
            rb.record(n6, probe_n6(n, x, plan.point_radius, tol)?);
        }
    }

    rb.note("N2 is sampled one way at a time: N(0, a) = 1 on the grid, and some a with N(x, a) < 1 for sampled x != 0");
    rb.note(format!("N5 limit probed at a = {a_big:e} with tolerance {:e}", plan.limit_tol));
    rb.note("N6 checked as upper semicontinuity from one-sided probes at offsets 1e-3..1e-9");
    Ok(rb.finish())
}

/// Distance separating `(x, a)` from `(y, b)` before they count as different.
pub fn strict_convexity_separation(tol: f64) -> f64 {
    1e3 * tol
}

/// Tests one quadruple against the literal strict-convexity definition.
pub fn probe_strict_convexity(
    n: &FuzzyNorm,
    x: &Vector,
    y: &Vector,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<Option<WitnessData>> {
    let x_value = n.evaluate(x, a)?;
    let y_value = n.evaluate(y, b)?;
    let sum_value = n.evaluate(&x.add(y)?, a + b)?;
    let hypotheses = (sum_value - x_value.min(y_value)).abs() <= tol && (x_value - y_value).abs() <= tol;
    let separation = x.max_abs_diff(y)?.max((a - b).abs());
    Ok((hypotheses && separation > strict_convexity_separation(tol)).then(|| {
        WitnessData::StrictConvexity {
            x: x.clone(),
            y: y.clone(),
            a,
            b,
            sum_value,
            x_value,
            y_value,
        }
    }))
}

/// Searches for violations of the literal definition: equality in N4 with
/// equal fuzzy values, yet `(x, a) != (y, b)`.
///
/// The structured family `(x, c x, a, c a)` and the origin pair `(0, 0, a, 2a)`
/// are probed before the random quadruples.
pub fn check_strict_convexity(n: &FuzzyNorm, plan: &SamplePlan) -> Result<CheckReport> {
    plan.validate()?;
    let tol = plan.equality_tol;
    let dim = n.dimension();
    let grid = plan.thresholds();
    let mut sampler = plan.sampler();
    let mut rb = ReportBuilder::new();
    let clause = rb.clause("strict_convexity", tol);

    let mut bases = vec![Vector::basis(dim, 0)];
    bases.extend(anchor_points(dim, plan.point_radius).into_iter().filter(|p| !p.is_zero()));
    bases.extend(sampler.points(dim, plan.point_radius, plan.n_points.min(16)));
    let mut scalars = vec![2.0, 0.5, 3.0];
    scalars.push(sampler.log_uniform(1.1, 10.0));
    let mut thresholds = vec![1.0];
    thresholds.extend(grid.iter().copied());

    for x in &bases {
        for &c in &scalars {
            for &a in &thresholds {
                rb.record(clause, probe_strict_convexity(n, x, &x.scale(c), a, c * a, tol)?);
            }
        }
    }
    let zero = Vector::zeros(dim);
    for &a in &thresholds {
        rb.record(clause, probe_strict_convexity(n, &zero, &zero, a, 2.0 * a, tol)?);
    }
    let structured = rb.has_violation(clause);

    let points = sampler.points(dim, plan.point_radius, plan.n_points);
    for i in 0..points.len() {
        let j = sampler.index(points.len());
        let a = grid[sampler.index(grid.len())];
        let b = grid[sampler.index(grid.len())];
        rb.record(clause, probe_strict_convexity(n, &points[i], &points[j], a, b, tol)?);
    }
    if structured {
        rb.note("structured probe (x, c x, a, c a) produced a witness");
    }
    Ok(rb.finish())
}

/// Tests `‖u + v‖ = ‖u‖ + ‖v‖` for a non-parallel pair.
///
/// Directions count as different when their unit vectors are more than
/// `100 √tol` apart: near-parallel Euclidean pairs miss equality only to
/// second order in the angle.
pub fn probe_crisp_strict_convexity(
    kind: &CrispNormKind,
    u: &Vector,
    v: &Vector,
    tol: f64,
) -> Result<Option<WitnessData>> {
    if u.is_zero() || v.is_zero() {
        return Ok(None);
    }
    let u_norm = kind.eval(u.coords());
    let v_norm = kind.eval(v.coords());
    let sum_norm = kind.eval(u.add(v)?.coords());
    let equal = (sum_norm - (u_norm + v_norm)).abs() <= tol * (u_norm + v_norm).max(1.0);
    let du = u.scale(1.0 / u.dot(u)?.sqrt());
    let dv = v.scale(1.0 / v.dot(v)?.sqrt());
    let gap = du.sub(&dv)?.dot(&du.sub(&dv)?)?.sqrt();
    Ok((equal && gap > 100.0 * tol.sqrt()).then(|| WitnessData::CrispStrictConvexity {
        u: u.clone(),
        v: v.clone(),
        sum_norm,
        u_norm,
        v_norm,
    }))
}

/// Looks for non-parallel `u, v` with equality in the triangle inequality.
/// Axis pairs `(e_i, e_j)`, `(e_i, e_i ± e_j)` go first.
pub fn check_crisp_strict_convexity(kind: &CrispNormKind, dim: usize, plan: &SamplePlan) -> Result<CheckReport> {
    plan.validate()?;
    kind.validate(dim)?;
    let tol = plan.equality_tol;
    let mut rb = ReportBuilder::new();
    let clause = rb.clause("crisp_strict_convexity", tol);
    for i in 0..dim {
        let ei = Vector::basis(dim, i);
        for j in (0..dim).filter(|&j| j != i) {
            let ej = Vector::basis(dim, j);
            for v in [ej.clone(), ei.add(&ej)?, ei.sub(&ej)?] {
                rb.record(clause, probe_crisp_strict_convexity(kind, &ei, &v, tol)?);
            }
        }
    }
    let mut sampler = plan.sampler();
    let points = sampler.points(dim, plan.point_radius, plan.n_points);
    for i in 0..points.len() {
        let j = sampler.index(points.len());
        rb.record(clause, probe_crisp_strict_convexity(kind, &points[i], &points[j], tol)?);
    }
    Ok(rb.finish())
}
