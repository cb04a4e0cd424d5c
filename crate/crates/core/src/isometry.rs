//! Maps between fuzzy normed spaces, the fuzzy-isometry and
//! collinearity-preservation checkers, and generators for test maps.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{contract, domain, structural, Result};
use crate::fuzzy_norm::FuzzyNorm;
use crate::geometry::collinear;
use crate::report::{CheckReport, ReportBuilder, WitnessData};
use crate::sampling::{anchor_points, SamplePlan, Sampler};
use crate::vecspace::Vector;

pub type MapFn = Arc<dyn Fn(&Vector) -> Vector + Send + Sync>;

/// An evaluable map `f: R^dom_dim -> R^cod_dim`.
#[derive(Clone)]
pub struct MapSpec {
    evaluator: MapFn,
    dom_dim: usize,
    cod_dim: usize,
    label: String,
}

impl fmt::Debug for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MapSpec")
            .field("label", &self.label)
            .field("dom_dim", &self.dom_dim)
            .field("cod_dim", &self.cod_dim)
            .finish()
    }
}

impl MapSpec {
    pub fn new(label: impl Into<String>, dom_dim: usize, cod_dim: usize, evaluator: MapFn) -> Result<Self> {
        if dom_dim == 0 || cod_dim == 0 {
            return Err(structural("map dimensions must be positive"));
        }
        Ok(Self {
            evaluator,
            dom_dim,
            cod_dim,
            label: label.into(),
        })
    }

    pub fn dom_dim(&self) -> usize {
        self.dom_dim
    }

    pub fn cod_dim(&self) -> usize {
        self.cod_dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `f(x)`, with the image checked for shape and finiteness.
    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        if x.dim() != self.dom_dim {
            return Err(structural(format!(
                "map `{}` expects dimension {}, got {}",
                self.label,
                self.dom_dim,
                x.dim()
            )));
        }
        let y = (self.evaluator)(x);
        if y.dim() != self.cod_dim || !y.is_finite() {
            return Err(contract(format!(
                "map `{}` produced an invalid image {y} at {x}",
                self.label
            )));
        }
        Ok(y)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new("identity", dim, dim, Arc::new(|x: &Vector| x.clone()))
    }

    /// `x ↦ L x + offset`.
    pub fn affine(label: impl Into<String>, linear: DMatrix<f64>, offset: Vector) -> Result<Self> {
        if linear.nrows() != offset.dim() {
            return Err(structural("offset length must equal the number of rows"));
        }
        let (rows, cols) = linear.shape();
        Self::new(label, cols, rows, Arc::new(move |x: &Vector| {
            let y = &linear * DVector::from_column_slice(x.coords());
            Vector::from_raw(y.iter().zip(offset.coords()).map(|(a, b)| a + b).collect())
        }))
    }

    pub fn constant(dom_dim: usize, value: Vector) -> Result<Self> {
        let cod = value.dim();
        Self::new("constant", dom_dim, cod, Arc::new(move |_: &Vector| value.clone()))
    }
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the signs
/// of `R`'s diagonal folded into `Q`. Redraws when `R` is near-singular.
pub fn random_orthogonal(seed: u64, dim: usize) -> Result<DMatrix<f64>> {
    if dim == 0 {
        return Err(structural("dimension must be at least 1"));
    }
    let mut sampler = Sampler::new(seed);
    for _ in 0..16 {
        let g = DMatrix::from_fn(dim, dim, |_, _| sampler.normal());
        let qr = g.qr();
        let r = qr.r();
        if (0..dim).any(|i| r[(i, i)].abs() < 1e-8) {
            continue;
        }
        let mut q = qr.q();
        for j in 0..dim {
            if r[(j, j)] < 0.0 {
                q.column_mut(j).neg_mut();
            }
        }
        let defect = (q.transpose() * &q - DMatrix::identity(dim, dim)).amax();
        if defect > 1e-12 {
            return Err(contract(format!("orthogonality defect {defect:e} after QR")));
        }
        return Ok(q);
    }
    Err(structural("random matrix stayed singular after 16 draws"))
}

/// `x ↦ Q x + translation` with `Q` from [`random_orthogonal`].
pub fn make_rigid_map(seed: u64, dim: usize, translation: Vector) -> Result<MapSpec> {
    if translation.dim() != dim {
        return Err(structural("translation must match the dimension"));
    }
    let q = random_orthogonal(seed, dim)?;
    MapSpec::affine(format!("rigid(seed={seed}, dim={dim})"), q, translation)
}

pub fn make_scaling(dim: usize, c: f64) -> Result<MapSpec> {
    if !c.is_finite() {
        return Err(domain("scale factor must be finite"));
    }
    MapSpec::new(format!("scaling({c})"), dim, dim, Arc::new(move |x: &Vector| x.scale(c)))
}

/// `t ↦ (t, sin t)` from the line to the plane.
pub fn make_sine_curve_map() -> MapSpec {
    MapSpec::new("sine_curve", 1, 2, Arc::new(|x: &Vector| {
        let t = x.coords()[0];
        Vector::from_raw(vec![t, t.sin()])
    }))
    .expect("fixed dimensions")
}

/// A rigid map plus `magnitude · sin(x_i)` in each coordinate.
pub fn make_perturbed_isometry(seed: u64, dim: usize, magnitude: f64) -> Result<MapSpec> {
    if !magnitude.is_finite() {
        return Err(domain("magnitude must be finite"));
    }
    let q = random_orthogonal(seed, dim)?;
    MapSpec::new(
        format!("perturbed_isometry(seed={seed}, magnitude={magnitude})"),
        dim,
        dim,
        Arc::new(move |x: &Vector| {
            let y = &q * DVector::from_column_slice(x.coords());
            Vector::from_raw(
                y.iter()
                    .zip(x.coords())
                    .map(|(yi, xi)| yi + magnitude * xi.sin())
                    .collect(),
            )
        }),
    )
}

fn check_dims(dom: &FuzzyNorm, cod: &FuzzyNorm, f: &MapSpec) -> Result<()> {
    if dom.dimension() != f.dom_dim() || cod.dimension() != f.cod_dim() {
        return Err(structural(format!(
            "map `{}` is {} -> {} but the spaces are {} -> {}",
            f.label(),
            f.dom_dim(),
            f.cod_dim(),
            dom.dimension(),
            cod.dimension()
        )));
    }
    Ok(())
}

/// Compares `N(x - y, a)` with `N(f(x) - f(y), a)`.
pub fn probe_isometry(
    dom: &FuzzyNorm,
    cod: &FuzzyNorm,
    f: &MapSpec,
    x: &Vector,
    y: &Vector,
    a: f64,
    tol: f64,
) -> Result<Option<WitnessData>> {
    let domain_value = dom.evaluate(&x.sub(y)?, a)?;
    let codomain_value = cod.evaluate(&f.apply(x)?.sub(&f.apply(y)?)?, a)?;
    Ok(((domain_value - codomain_value).abs() > tol).then(|| WitnessData::Isometry {
        x: x.clone(),
        y: y.clone(),
        a,
        domain_value,
        codomain_value,
    }))
}

fn domain_points(dim: usize, plan: &SamplePlan, sampler: &mut Sampler) -> Vec<Vector> {
    let mut points = anchor_points(dim, plan.point_radius);
    points.extend(sampler.points(dim, plan.point_radius, plan.n_points));
    points
}

/// Samples pairs and thresholds looking for `N(x - y, a) != N(f(x) - f(y), a)`.
pub fn check_isometry(dom: &FuzzyNorm, cod: &FuzzyNorm, f: &MapSpec, plan: &SamplePlan) -> Result<CheckReport> {
    plan.validate()?;
    check_dims(dom, cod, f)?;
    let tol = plan.equality_tol;
    let grid = plan.thresholds();
    let mut sampler = plan.sampler();
    let points = domain_points(f.dom_dim(), plan, &mut sampler);
    let mut rb = ReportBuilder::new();
    let clause = rb.clause("isometry", tol);
    let m = points.len();
    for i in 0..m {
        let partners = [(i + 1) % m, sampler.index(m)];
        for j in partners {
            for &a in &grid {
                rb.record(clause, probe_isometry(dom, cod, f, &points[i], &points[j], a, tol)?);
            }
        }
    }
    Ok(rb.finish())
}

/// Checks that the images of `a`, `b = c + t (a - c)`, `c` are collinear.
pub fn probe_collinearity(f: &MapSpec, a: &Vector, c: &Vector, t: f64, tol: f64) -> Result<Option<WitnessData>> {
    let b = c.add(&a.sub(c)?.scale(t))?;
    let (image_a, image_b, image_c) = (f.apply(a)?, f.apply(&b)?, f.apply(c)?);
    let verdict = collinear(&image_a, &image_b, &image_c, tol)?;
    Ok((!verdict.collinear).then(|| WitnessData::Collinearity {
        a: a.clone(),
        c: c.clone(),
        t,
        image_a,
        image_b,
        image_c,
        residual: verdict.residual,
    }))
}

/// Samples collinear triples `(a, c + t (a - c), c)` with `t ∈ [-2, 2]`
/// (always including 0, 1 and 1/2) and checks that their images stay
/// collinear.
pub fn check_collinearity_preservation(f: &MapSpec, plan: &SamplePlan, tol: f64) -> Result<CheckReport> {
    plan.validate()?;
    let mut sampler = plan.sampler();
    let dim = f.dom_dim();
    let mut rb = ReportBuilder::new();
    let clause = rb.clause("collinearity_preservation", tol);
    let origin = Vector::zeros(dim);
    for c in anchor_points(dim, plan.point_radius).iter().skip(1) {
        rb.record(clause, probe_collinearity(f, &origin, c, 0.5, tol)?);
    }
    let points = sampler.points(dim, plan.point_radius, plan.n_points);
    let m = points.len();
    for i in 0..m {
        let (a, c) = (&points[i], &points[(i + 1) % m]);
        let t = sampler.uniform(-2.0, 2.0);
        for t in [0.0, 1.0, 0.5, t] {
            rb.record(clause, probe_collinearity(f, a, c, t, tol)?);
        }
    }
    Ok(rb.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vecspace::CrispNormKind;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    fn euclid(dim: usize) -> FuzzyNorm {
        FuzzyNorm::crisp_induced(CrispNormKind::Euclidean, dim).unwrap()
    }

    #[test]
    fn generators() {
        let f = make_rigid_map(7, 3, v(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(f.apply(&v(&[0.0, 0.0, 0.0])).unwrap(), v(&[1.0, 2.0, 3.0]));
        let id = make_scaling(2, 1.0).unwrap();
        assert_eq!(id.apply(&v(&[0.3, -7.0])).unwrap(), v(&[0.3, -7.0]));
        let s = make_sine_curve_map();
        assert_eq!(s.apply(&v(&[FRAC_PI_2])).unwrap(), v(&[FRAC_PI_2, 1.0]));
        assert_eq!(random_orthogonal(11, 4).unwrap(), random_orthogonal(11, 4).unwrap());
    }

    #[test]
    fn rigid_maps_are_isometries() {
        for dim in 1..=5 {
            let f = make_rigid_map(dim as u64, dim, Vector::basis(dim, 0).scale(2.5)).unwrap();
            let r = check_isometry(&euclid(dim), &euclid(dim), &f, &SamplePlan::with_seed(3)).unwrap();
            assert!(r.passed(), "dim {dim}: {:?}", r.witnesses.first());
            assert!(check_collinearity_preservation(&f, &SamplePlan::default(), 1e-9).unwrap().passed());
        }
    }

    #[test]
    fn scaling_is_not_an_isometry() {
        let f = make_scaling(2, 1.1).unwrap();
        let w = probe_isometry(&euclid(2), &euclid(2), &f, &v(&[1.0, 0.0]), &v(&[0.0, 0.0]), 1.0, 1e-9)
            .unwrap()
            .unwrap();
        match w {
            WitnessData::Isometry { domain_value, codomain_value, .. } => {
                assert_eq!(domain_value, 0.5);
                assert!((codomain_value - 1.0 / 2.1).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        assert!(!check_isometry(&euclid(2), &euclid(2), &f, &SamplePlan::default()).unwrap().passed());
    }

    #[test]
    fn sine_curve_separates_isometry_from_collinearity() {
        let f = make_sine_curve_map();
        let max2 = FuzzyNorm::crisp_induced(CrispNormKind::MaxNorm, 2).unwrap();
        let plan = SamplePlan { point_radius: PI, ..SamplePlan::default() };
        assert!(check_isometry(&euclid(1), &max2, &f, &plan).unwrap().passed());
        let r = check_collinearity_preservation(&f, &plan, 1e-9).unwrap();
        assert!(!r.passed());
        match &r.witnesses[0].data {
            WitnessData::Collinearity { a, c, t, image_b, .. } => {
                assert_eq!((a, c, *t), (&v(&[0.0]), &v(&[PI]), 0.5));
                assert_eq!(image_b, &v(&[FRAC_PI_2, 1.0]));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn identity_preserves_collinearity() {
        let f = MapSpec::identity(3).unwrap();
        assert!(check_collinearity_preservation(&f, &SamplePlan::default(), 1e-9).unwrap().passed());
    }

    #[test]
    fn isometry_verdict_is_symmetric_in_the_pair() {
        let f = make_perturbed_isometry(5, 2, 0.1).unwrap();
        let (n, x, y) = (euclid(2), v(&[0.3, -0.2]), v(&[-0.9, 0.4]));
        for a in [0.01, 1.0, 50.0] {
            let xy = probe_isometry(&n, &n, &f, &x, &y, a, 1e-9).unwrap();
            let yx = probe_isometry(&n, &n, &f, &y, &x, a, 1e-9).unwrap();
            assert_eq!(xy.is_some(), yx.is_some());
            assert!(xy.is_some());
        }
    }

    #[test]
    fn bad_maps_are_contract_violations() {
        let f = MapSpec::new("nan", 1, 1, Arc::new(|_: &Vector| Vector::from_raw(vec![f64::NAN]))).unwrap();
        assert!(matches!(f.apply(&v(&[1.0])), Err(crate::Error::ContractViolation(_))));
        let f = make_scaling(2, 1.0).unwrap();
        assert!(matches!(
            check_isometry(&euclid(3), &euclid(3), &f, &SamplePlan::default()),
            Err(crate::Error::Structural(_))
        ));
    }
}
