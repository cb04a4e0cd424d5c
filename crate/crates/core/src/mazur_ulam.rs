//! Affine certification of fuzzy isometries.
//!
//! The pipeline normalizes `f` to `h = f - f(0)`, then checks the chain
//! midpoint preservation → additivity and dyadic homogeneity → real
//! homogeneity, and finally fits an explicit affine model `x ↦ L x + b`.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{domain, structural, Result};
use crate::fuzzy_norm::FuzzyNorm;
use crate::geometry::collinear;
use crate::isometry::{check_collinearity_preservation, check_isometry, MapSpec};
use crate::report::{CheckReport, ReportBuilder, WitnessData};
use crate::sampling::{anchor_points, SamplePlan};
use crate::vecspace::{CrispNormKind, Vector};

/// Thresholds used to turn an image difference into a fuzzy defect when the
/// codomain norm has no crisp norm underneath.
pub const DEFECT_THRESHOLDS: [f64; 7] = [1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3];

/// Irrational scalars always probed for real homogeneity.
pub const IRRATIONAL_PROBES: [f64; 3] = [std::f64::consts::SQRT_2, std::f64::consts::PI, 1.0 / std::f64::consts::E];

/// Size of an image difference: its crisp norm for crisp-induced codomains,
/// otherwise `max_a (1 - N(d, a))` over [`DEFECT_THRESHOLDS`].
pub fn image_defect(cod: &FuzzyNorm, d: &Vector) -> Result<f64> {
    match cod.crisp_kind() {
        Some(kind) => Ok(kind.eval(d.coords())),
        None => {
            let mut worst: f64 = 0.0;
            for a in DEFECT_THRESHOLDS {
                worst = worst.max(1.0 - cod.evaluate(d, a)?);
            }
            Ok(worst)
        }
    }
}

/// `h(x) = f(x) - f(0)`, so `h(0) = 0` exactly.
pub fn normalize(f: &MapSpec) -> Result<MapSpec> {
    let f0 = f.apply(&Vector::zeros(f.dom_dim()))?;
    let inner = f.clone();
    MapSpec::new(
        format!("{} - f(0)", f.label()),
        f.dom_dim(),
        f.cod_dim(),
        Arc::new(move |x: &Vector| {
            let fx = inner.apply(x).expect("validated by the outer apply");
            fx.sub(&f0).expect("same codomain")
        }),
    )
}

fn require_origin_fixed(h: &MapSpec, tol: f64) -> Result<()> {
    let h0 = h.apply(&Vector::zeros(h.dom_dim()))?;
    let off = h0.coords().iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if off > tol {
        return Err(domain(format!(
            "map `{}` moves the origin to {h0}; normalize it first",
            h.label()
        )));
    }
    Ok(())
}

fn require_codomain(h: &MapSpec, cod: &FuzzyNorm) -> Result<()> {
    if h.cod_dim() != cod.dimension() {
        return Err(structural("codomain norm does not match the map"));
    }
    Ok(())
}

pub fn probe_midpoint_preservation(
    h: &MapSpec,
    cod: &FuzzyNorm,
    a: &Vector,
    b: &Vector,
    tol: f64,
) -> Result<Option<WitnessData>> {
    let lhs = h.apply(&a.midpoint(b)?)?;
    let rhs = h.apply(a)?.midpoint(&h.apply(b)?)?;
    let defect = image_defect(cod, &lhs.sub(&rhs)?)?;
    Ok((defect > tol).then(|| WitnessData::MidpointPreservation {
        a: a.clone(),
        b: b.clone(),
        defect,
    }))
}

/// Pairs probed before random ones: `(0, ρ e_i)` and `(-ρ e_i, ρ e_i)`.
fn anchor_pairs(dim: usize, radius: f64) -> Vec<(Vector, Vector)> {
    let mut out = Vec::new();
    for i in 0..dim {
        let e = Vector::basis(dim, i).scale(radius);
        out.push((Vector::zeros(dim), e.clone()));
        out.push((e.scale(-1.0), e));
    }
    out
}

/// `h((a + b) / 2) = (h(a) + h(b)) / 2` on sampled pairs.
pub fn check_midpoint_preservation(h: &MapSpec, cod: &FuzzyNorm, plan: &SamplePlan, tol: f64) -> Result<CheckReport> {
    plan.validate()?;
    require_codomain(h, cod)?;
    require_origin_fixed(h, tol)?;
    let dim = h.dom_dim();
    let mut rb = ReportBuilder::new();
    let clause = rb.clause("midpoint_preservation", tol);
    for (a, b) in anchor_pairs(dim, plan.point_radius) {
        rb.record(clause, probe_midpoint_preservation(h, cod, &a, &b, tol)?);
    }
    let points = plan.sampler().points(dim, plan.point_radius, plan.n_points);
    for i in 0..points.len() {
        let j = (i + 1) % points.len();
        rb.record(clause, probe_midpoint_preservation(h, cod, &points[i], &points[j], tol)?);
    }
    Ok(rb.finish())
}

pub fn probe_additivity(h: &MapSpec, cod: &FuzzyNorm, a: &Vector, b: &Vector, tol: f64) -> Result<Option<WitnessData>> {
    let lhs = h.apply(&a.add(b)?)?;
    let rhs = h.apply(a)?.add(&h.apply(b)?)?;
    let defect = image_defect(cod, &lhs.sub(&rhs)?)?;
    Ok((defect > tol).then(|| WitnessData::Additivity {
        a: a.clone(),
        b: b.clone(),
        defect,
    }))
}

pub fn probe_scalar_homogeneity(h: &MapSpec, cod: &FuzzyNorm, a: &Vector, q: f64, tol: f64) -> Result<(f64, bool)> {
    let lhs = h.apply(&a.scale(q))?;
    let rhs = h.apply(a)?.scale(q);
    let defect = image_defect(cod, &lhs.sub(&rhs)?)?;
    Ok((defect, defect > tol * q.abs().max(1.0)))
}

pub fn probe_rational_homogeneity(h: &MapSpec, cod: &FuzzyNorm, a: &Vector, q: f64, tol: f64) -> Result<Option<WitnessData>> {
    let (defect, bad) = probe_scalar_homogeneity(h, cod, a, q, tol)?;
    Ok(bad.then(|| WitnessData::RationalHomogeneity { a: a.clone(), q, defect }))
}

/// Like the rational probe, but also reports the factor `r'` with
/// `h(r a) = r' h(a)` when the two images are parallel.
pub fn probe_real_homogeneity(h: &MapSpec, cod: &FuzzyNorm, a: &Vector, r: f64, tol: f64) -> Result<Option<WitnessData>> {
    let (defect, bad) = probe_scalar_homogeneity(h, cod, a, r, tol)?;
    if !bad {
        return Ok(None);
    }
    let image = h.apply(a)?;
    let scaled = h.apply(&a.scale(r))?;
    let origin = Vector::zeros(image.dim());
    let r_prime = collinear(&image, &scaled, &origin, tol)?.t;
    Ok(Some(WitnessData::RealHomogeneity {
        a: a.clone(),
        r,
        defect,
        r_prime,
    }))
}

/// Dyadic rationals `m / 2^k` with `|m| ≤ 2^k`, `k ≤ depth`, sorted and
/// deduplicated.
pub fn dyadic_rationals(depth: u32) -> Vec<f64> {
    let denom = 1i64 << depth;
    (-denom..=denom).map(|m| m as f64 / denom as f64).collect()
}

/// Additivity on sampled pairs and homogeneity under dyadic rationals.
pub fn check_q_linearity(
    h: &MapSpec,
    cod: &FuzzyNorm,
    plan: &SamplePlan,
    dyadic_depth: u32,
    tol: f64,
) -> Result<CheckReport> {
    plan.validate()?;
    require_codomain(h, cod)?;
    require_origin_fixed(h, tol)?;
    if dyadic_depth == 0 || dyadic_depth > 20 {
        return Err(domain(format!("dyadic_depth must be in 1..=20, got {dyadic_depth}")));
    }
    let dim = h.dom_dim();
    let mut rb = ReportBuilder::new();
    let additivity = rb.clause("additivity", tol);
    let homogeneity = rb.clause("rational_homogeneity", tol);
    let half = plan.point_radius / 2.0;
    for i in 0..dim {
        let e = Vector::basis(dim, i).scale(half);
        rb.record(additivity, probe_additivity(h, cod, &e, &e, tol)?);
    }
    let points = plan.sampler().points(dim, plan.point_radius, plan.n_points);
    for i in 0..points.len() {
        let j = (i + 1) % points.len();
        rb.record(additivity, probe_additivity(h, cod, &points[i], &points[j], tol)?);
    }
    let mut bases = anchor_points(dim, plan.point_radius);
    bases.remove(0);
    bases.extend(points.iter().take(16).cloned());
    for a in &bases {
        for q in dyadic_rationals(dyadic_depth) {
            rb.record(homogeneity, probe_rational_homogeneity(h, cod, a, q, tol)?);
        }
    }
    Ok(rb.finish())
}

/// `h(r a) = r h(a)` for irrational probes, `r = 1`, and sampled `r ∈ [-3, 3]`,
/// at unit axis vectors and sampled points. Tolerance scales with `max(1, |r|)`.
pub fn check_real_homogeneity(h: &MapSpec, cod: &FuzzyNorm, plan: &SamplePlan, tol: f64) -> Result<CheckReport> {
    plan.validate()?;
    require_codomain(h, cod)?;
    require_origin_fixed(h, tol)?;
    let dim = h.dom_dim();
    let mut sampler = plan.sampler();
    let mut scalars: Vec<f64> = IRRATIONAL_PROBES.to_vec();
    scalars.push(1.0);
    scalars.extend((0..4).map(|_| sampler.uniform(-3.0, 3.0)));
    let mut bases: Vec<Vector> = (0..dim).map(|i| Vector::basis(dim, i)).collect();
    bases.extend(sampler.points(dim, plan.point_radius, plan.n_points));
    let mut rb = ReportBuilder::new();
    let clause = rb.clause("real_homogeneity", tol);
    for a in &bases {
        for &r in &scalars {
            rb.record(clause, probe_real_homogeneity(h, cod, a, r, tol)?);
        }
    }
    Ok(rb.finish())
}

/// Least-squares affine model `x ↦ L x + b` of a map over a sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineFit {
    /// `L`, row-major, `cod_dim × dom_dim`.
    pub linear_part: Vec<Vec<f64>>,
    pub offset: Vector,
    /// Largest `‖f(x) - (L x + b)‖` over the sample, in `residual_norm`.
    pub residual: f64,
    pub residual_norm: CrispNormKind,
    pub sample: Vec<Vector>,
    pub images: Vec<Vector>,
}

impl AffineFit {
    pub fn predict(&self, x: &Vector) -> Result<Vector> {
        if x.dim() != self.linear_part.first().map_or(0, |r| r.len()) {
            return Err(structural("point does not match the fitted domain"));
        }
        Ok(Vector::from_raw(
            self.linear_part
                .iter()
                .zip(self.offset.coords())
                .map(|(row, b)| row.iter().zip(x.coords()).map(|(l, xi)| l * xi).sum::<f64>() + b)
                .collect(),
        ))
    }

    /// Per-sample residuals, recomputed from the stored sample and images.
    pub fn residuals(&self) -> Result<Vec<f64>> {
        self.sample
            .iter()
            .zip(&self.images)
            .map(|(x, y)| Ok(self.residual_norm.eval(y.sub(&self.predict(x)?)?.coords())))
            .collect()
    }

    pub fn recompute_residual(&self) -> Result<f64> {
        Ok(self.residuals()?.into_iter().fold(0.0, f64::max))
    }

    pub fn linear_matrix(&self) -> DMatrix<f64> {
        let rows = self.linear_part.len();
        let cols = self.linear_part.first().map_or(0, |r| r.len());
        DMatrix::from_fn(rows, cols, |i, j| self.linear_part[i][j])
    }
}

/// Fits `f` over the given sample. Fails if the centered sample does not span
/// the domain.
pub fn fit_affine_on(f: &MapSpec, sample: &[Vector], residual_norm: &CrispNormKind) -> Result<AffineFit> {
    let dom = f.dom_dim();
    residual_norm.validate(f.cod_dim())?;
    if sample.len() < dom + 1 {
        return Err(structural(format!(
            "affine fit needs at least {} points, got {}",
            dom + 1,
            sample.len()
        )));
    }
    let n = sample.len();
    let mut mean = vec![0.0; dom];
    for x in sample {
        for (m, c) in mean.iter_mut().zip(x.coords()) {
            *m += c / n as f64;
        }
    }
    let centered = DMatrix::from_fn(n, dom, |i, j| sample[i].coords()[j] - mean[j]);
    let sv = centered.singular_values();
    let top = sv.max();
    let rank = sv.iter().filter(|&&s| s > 1e-10 * top.max(f64::MIN_POSITIVE)).count();
    if top == 0.0 || rank < dom {
        return Err(structural(format!(
            "affine fit sample is rank-deficient: centered rank {rank} < dimension {dom}"
        )));
    }

    let images: Vec<Vector> = sample.iter().map(|x| f.apply(x)).collect::<Result<_>>()?;
    let cod = f.cod_dim();
    let design = DMatrix::from_fn(n, dom + 1, |i, j| if j < dom { sample[i].coords()[j] } else { 1.0 });
    let targets = DMatrix::from_fn(n, cod, |i, k| images[i].coords()[k]);
    let coeffs = design
        .svd(true, true)
        .solve(&targets, 1e-14)
        .map_err(|e| structural(format!("least-squares solve failed: {e}")))?;
    let linear_part: Vec<Vec<f64>> = (0..cod).map(|k| (0..dom).map(|j| coeffs[(j, k)]).collect()).collect();
    let offset = Vector::new((0..cod).map(|k| coeffs[(dom, k)]).collect())?;
    let mut fit = AffineFit {
        linear_part,
        offset,
        residual: 0.0,
        residual_norm: residual_norm.clone(),
        sample: sample.to_vec(),
        images,
    };
    fit.residual = fit.recompute_residual()?;
    Ok(fit)
}

/// Fits `f` over the anchor points plus `plan.n_points` sampled points.
pub fn fit_affine(f: &MapSpec, plan: &SamplePlan, residual_norm: &CrispNormKind) -> Result<AffineFit> {
    plan.validate()?;
    let mut sample = anchor_points(f.dom_dim(), plan.point_radius);
    sample.extend(plan.sampler().points(f.dom_dim(), plan.point_radius, plan.n_points));
    fit_affine_on(f, &sample, residual_norm)
}

pub fn probe_affine_residual(f: &MapSpec, fit: &AffineFit, x: &Vector, tol: f64) -> Result<Option<WitnessData>> {
    let image = f.apply(x)?;
    let prediction = fit.predict(x)?;
    let defect = fit.residual_norm.eval(image.sub(&prediction)?.coords());
    Ok((defect > tol).then(|| WitnessData::AffineResidual {
        x: x.clone(),
        image,
        prediction,
        defect,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    /// Largest affine-fit residual still certified.
    pub cert_tol: f64,
    pub collinear_tol: f64,
    /// Tolerance for the midpoint, additivity and homogeneity checks.
    pub check_tol: f64,
    pub dyadic_depth: u32,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            cert_tol: 1e-6,
            collinear_tol: 1e-9,
            check_tol: 1e-9,
            dyadic_depth: 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateVerdict {
    CertifiedAffine,
    Refuted,
    Inconclusive,
}

/// Every stage of the pipeline; stages after a short-circuit are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffinityCertificate {
    pub map: String,
    pub verdict: CertificateVerdict,
    pub isometry_report: CheckReport,
    pub collinearity_report: Option<CheckReport>,
    /// Isometry check repeated on `h = f - f(0)`.
    pub normalized_isometry_report: Option<CheckReport>,
    pub midpoint_report: Option<CheckReport>,
    pub q_linearity_report: Option<CheckReport>,
    pub homogeneity_report: Option<CheckReport>,
    pub fit: Option<AffineFit>,
    pub fit_report: Option<CheckReport>,
    pub options: CertifyOptions,
}

impl AffinityCertificate {
    /// Reports in pipeline order, skipping stages that did not run.
    pub fn reports(&self) -> Vec<&CheckReport> {
        std::iter::once(&self.isometry_report)
            .chain(self.collinearity_report.iter())
            .chain(self.normalized_isometry_report.iter())
            .chain(self.midpoint_report.iter())
            .chain(self.q_linearity_report.iter())
            .chain(self.homogeneity_report.iter())
            .chain(self.fit_report.iter())
            .collect()
    }

    /// Witnesses against affinity itself (as opposed to the hypotheses).
    pub fn conclusion_witnesses(&self) -> usize {
        [&self.midpoint_report, &self.q_linearity_report, &self.homogeneity_report, &self.fit_report]
            .into_iter()
            .flatten()
            .map(|r| r.witnesses.len())
            .sum()
    }
}

/// Runs the pipeline and classifies `f`:
///
/// * `certified_affine`: every check passes and the fit residual is within
///   `cert_tol`;
/// * `refuted`: a midpoint, linearity, homogeneity or fit witness shows `f`
///   is not affine;
/// * `inconclusive`: a hypothesis fails without any witness against
///   affinity. A non-isometry stops right after the first check.
pub fn certify_affine(
    f: &MapSpec,
    dom: &FuzzyNorm,
    cod: &FuzzyNorm,
    plan: &SamplePlan,
    opts: &CertifyOptions,
) -> Result<AffinityCertificate> {
    let mut cert = AffinityCertificate {
        map: f.label().to_string(),
        verdict: CertificateVerdict::Inconclusive,
        isometry_report: check_isometry(dom, cod, f, plan)?,
        collinearity_report: None,
        normalized_isometry_report: None,
        midpoint_report: None,
        q_linearity_report: None,
        homogeneity_report: None,
        fit: None,
        fit_report: None,
        options: *opts,
    };
    if !cert.isometry_report.passed() {
        return Ok(cert);
    }
    cert.collinearity_report = Some(check_collinearity_preservation(f, plan, opts.collinear_tol)?);
    let h = normalize(f)?;
    cert.normalized_isometry_report = Some(check_isometry(dom, cod, &h, plan)?);

    let midpoint = check_midpoint_preservation(&h, cod, plan, opts.check_tol)?;
    let refuted = !midpoint.passed();
    cert.midpoint_report = Some(midpoint);
    if refuted {
        cert.verdict = CertificateVerdict::Refuted;
        return Ok(cert);
    }
    let q_linear = check_q_linearity(&h, cod, plan, opts.dyadic_depth, opts.check_tol)?;
    let refuted = !q_linear.passed();
    cert.q_linearity_report = Some(q_linear);
    if refuted {
        cert.verdict = CertificateVerdict::Refuted;
        return Ok(cert);
    }
    let homogeneity = check_real_homogeneity(&h, cod, plan, opts.check_tol)?;
    let refuted = !homogeneity.passed();
    cert.homogeneity_report = Some(homogeneity);
    if refuted {
        cert.verdict = CertificateVerdict::Refuted;
        return Ok(cert);
    }

    let residual_norm = cod.crisp_kind().cloned().unwrap_or(CrispNormKind::Euclidean);
    let fit = fit_affine(f, plan, &residual_norm)?;
    let mut rb = ReportBuilder::new();
    let clause = rb.clause("affine_fit", opts.cert_tol);
    for x in &fit.sample {
        rb.record(clause, probe_affine_residual(f, &fit, x, opts.cert_tol)?);
    }
    rb.note(format!("fit residual {:e}", fit.residual));
    let fit_report = rb.finish();
    let fit_ok = fit_report.passed();
    cert.fit = Some(fit);
    cert.fit_report = Some(fit_report);

    let hypotheses = cert.collinearity_report.as_ref().is_some_and(|r| r.passed())
        && cert.normalized_isometry_report.as_ref().is_some_and(|r| r.passed());
    cert.verdict = if !fit_ok {
        CertificateVerdict::Refuted
    } else if hypotheses {
        CertificateVerdict::CertifiedAffine
    } else {
        CertificateVerdict::Inconclusive
    };
    Ok(cert)
}
