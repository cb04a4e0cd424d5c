//! Truncated checks of fuzzy convergence and the Cauchy condition.
//!
//! Both checks are finite: a pass means the condition held on indices up to
//! the horizon `n_max`, and the report says so.

use std::fmt;
use std::sync::Arc;

use crate::error::{domain, structural, Result};
use crate::fuzzy_norm::FuzzyNorm;
use crate::report::{CheckReport, ReportBuilder, WitnessData};
use crate::vecspace::Vector;

pub type Generator = Arc<dyn Fn(usize) -> Vector + Send + Sync>;

/// A sequence `x_1, x_2, ...` truncated at `n_max`.
#[derive(Clone)]
pub struct SequenceSpec {
    generator: Generator,
    dimension: usize,
    n_max: usize,
    label: String,
}

impl fmt::Debug for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SequenceSpec")
            .field("label", &self.label)
            .field("dimension", &self.dimension)
            .field("n_max", &self.n_max)
            .finish()
    }
}

impl SequenceSpec {
    pub fn new(label: impl Into<String>, dimension: usize, n_max: usize, generator: Generator) -> Result<Self> {
        if dimension == 0 || n_max == 0 {
            return Err(structural("sequence needs positive dimension and horizon"));
        }
        Ok(Self {
            generator,
            dimension,
            n_max,
            label: label.into(),
        })
    }

    /// `x_n = base + (1/n) direction`.
    pub fn drift(base: Vector, direction: Vector, n_max: usize) -> Result<Self> {
        crate::vecspace::check_same_dim(&base, &direction)?;
        let dim = base.dim();
        Self::new("drift", dim, n_max, Arc::new(move |n| {
            base.add(&direction.scale(1.0 / n as f64)).expect("dimensions checked")
        }))
    }

    pub fn constant(x: Vector, n_max: usize) -> Result<Self> {
        let dim = x.dim();
        Self::new("constant", dim, n_max, Arc::new(move |_| x.clone()))
    }

    /// `x_n = (-1)^n direction`.
    pub fn alternating(direction: Vector, n_max: usize) -> Result<Self> {
        let dim = direction.dim();
        Self::new("alternating", dim, n_max, Arc::new(move |n| {
            direction.scale(if n % 2 == 0 { 1.0 } else { -1.0 })
        }))
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `x_n` for `1 ≤ n ≤ n_max`.
    pub fn term(&self, n: usize) -> Result<Vector> {
        if n == 0 || n > self.n_max {
            return Err(domain(format!("index {n} outside 1..={}", self.n_max)));
        }
        let x = (self.generator)(n);
        if x.dim() != self.dimension || !x.is_finite() {
            return Err(crate::error::contract(format!(
                "sequence `{}` produced an invalid term at n = {n}",
                self.label
            )));
        }
        Ok(x)
    }
}

fn validate(n: &FuzzyNorm, seq: &SequenceSpec, eps: f64, a_grid: &[f64]) -> Result<()> {
    if a_grid.is_empty() {
        return Err(structural("a_grid is empty"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(domain(format!("eps must lie in (0, 1), got {eps}")));
    }
    if let Some(a) = a_grid.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
        return Err(domain(format!("thresholds must be positive, got {a}")));
    }
    if seq.dimension() != n.dimension() {
        return Err(structural("sequence and fuzzy norm dimensions differ"));
    }
    Ok(())
}

/// `N(x_n - limit, a)`; violation when it is not above `1 - eps`.
pub fn probe_convergence(
    n: &FuzzyNorm,
    seq: &SequenceSpec,
    limit: &Vector,
    a: f64,
    index: usize,
    eps: f64,
) -> Result<Option<WitnessData>> {
    let value = n.evaluate(&seq.term(index)?.sub(limit)?, a)?;
    Ok((value <= 1.0 - eps).then_some(WitnessData::Convergence { a, n: index, value }))
}

/// `N(x_{n+p} - x_n, a)`; violation when it is not above `1 - eps`.
pub fn probe_cauchy(
    n: &FuzzyNorm,
    seq: &SequenceSpec,
    a: f64,
    index: usize,
    p: usize,
    eps: f64,
) -> Result<Option<WitnessData>> {
    let value = n.evaluate(&seq.term(index + p)?.sub(&seq.term(index)?)?, a)?;
    Ok((value <= 1.0 - eps).then_some(WitnessData::Cauchy { a, n: index, p, value }))
}

/// Passes iff for every `a` in the grid there is an `n0 ≤ n_max` with
/// `N(x_n - limit, a) > 1 - eps` on all of `n0..=n_max`. A failing `a` is
/// witnessed by the last index that violates the bound.
pub fn check_convergence(
    n: &FuzzyNorm,
    seq: &SequenceSpec,
    limit: &Vector,
    eps: f64,
    a_grid: &[f64],
) -> Result<CheckReport> {
    validate(n, seq, eps, a_grid)?;
    if limit.dim() != seq.dimension() {
        return Err(structural("limit has the wrong dimension"));
    }
    let mut rb = ReportBuilder::new();
    let clause = rb.clause("convergence", eps);
    for &a in a_grid {
        let mut last_violation = None;
        for index in 1..=seq.n_max() {
            if let Some(w) = probe_convergence(n, seq, limit, a, index, eps)? {
                last_violation = Some(w);
            }
        }
        match last_violation {
            Some(WitnessData::Convergence { n: bad, .. }) if bad == seq.n_max() => {
                rb.record(clause, last_violation);
            }
            Some(WitnessData::Convergence { n: bad, .. }) => {
                rb.record(clause, None);
                rb.note(format!("a = {a}: tail bound holds from n0 = {}", bad + 1));
            }
            _ => {
                rb.record(clause, None);
                rb.note(format!("a = {a}: tail bound holds from n0 = 1"));
            }
        }
    }
    rb.note(format!("verdict holds up to horizon n_max = {}", seq.n_max()));
    Ok(rb.finish())
}

/// Passes iff for every `a` in the grid there is an `n0` with
/// `N(x_{n+p} - x_n, a) > 1 - eps` for all `n0 ≤ n ≤ n_max - p_max` and
/// `1 ≤ p ≤ p_max`.
pub fn check_cauchy(
    n: &FuzzyNorm,
    seq: &SequenceSpec,
    eps: f64,
    a_grid: &[f64],
    p_max: usize,
) -> Result<CheckReport> {
    validate(n, seq, eps, a_grid)?;
    if p_max == 0 || p_max >= seq.n_max() {
        return Err(structural(format!(
            "p_max must satisfy 1 <= p_max < n_max (got p_max = {p_max}, n_max = {})",
            seq.n_max()
        )));
    }
    let last = seq.n_max() - p_max;
    let mut rb = ReportBuilder::new();
    let clause = rb.clause("cauchy", eps);
    for &a in a_grid {
        let mut last_violation = None;
        for index in 1..=last {
            for p in 1..=p_max {
                if let Some(w) = probe_cauchy(n, seq, a, index, p, eps)? {
                    last_violation = Some(w);
                }
            }
        }
        match last_violation {
            Some(WitnessData::Cauchy { n: bad, .. }) if bad == last => rb.record(clause, last_violation),
            Some(WitnessData::Cauchy { n: bad, .. }) => {
                rb.record(clause, None);
                rb.note(format!("a = {a}: Cauchy bound holds from n0 = {}", bad + 1));
            }
            _ => {
                rb.record(clause, None);
                rb.note(format!("a = {a}: Cauchy bound holds from n0 = 1"));
            }
        }
    }
    rb.note(format!("verdict holds up to horizon n_max = {} with p <= {p_max}", seq.n_max()));
    Ok(rb.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vecspace::CrispNormKind;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    fn euclid() -> FuzzyNorm {
        FuzzyNorm::crisp_induced(CrispNormKind::Euclidean, 2).unwrap()
    }

    #[test]
    fn drift_converges_and_is_cauchy() {
        let base = v(&[0.5, -1.0]);
        let seq = SequenceSpec::drift(base.clone(), v(&[1.0, 0.0]), 1000).unwrap();
        let r = check_convergence(&euclid(), &seq, &base, 0.01, &[1.0]).unwrap();
        assert!(r.passed());
        // n/(n+1) > 0.99 from n = 100 on; n = 99 sits on the boundary up to rounding.
        assert!(
            r.notes.iter().any(|n| n.contains("n0 = 100") || n.contains("n0 = 99")),
            "{:?}",
            r.notes
        );
        assert!(check_cauchy(&euclid(), &seq, 0.01, &[1.0], 10).unwrap().passed());
    }

    #[test]
    fn constant_sequence_passes_everything() {
        let x = v(&[3.0, 4.0]);
        let seq = SequenceSpec::constant(x.clone(), 50).unwrap();
        for eps in [0.5, 1e-3, 1e-12] {
            assert!(check_convergence(&euclid(), &seq, &x, eps, &[1e-3, 1.0, 1e3]).unwrap().passed());
            assert!(check_cauchy(&euclid(), &seq, eps, &[1e-3, 1.0], 5).unwrap().passed());
        }
    }

    #[test]
    fn alternating_sequence_fails_both() {
        let seq = SequenceSpec::alternating(v(&[1.0, 0.0]), 100).unwrap();
        let r = check_convergence(&euclid(), &seq, &v(&[0.0, 0.0]), 0.1, &[1.0]).unwrap();
        assert!(!r.passed());
        assert_eq!(r.witnesses[0].data, WitnessData::Convergence { a: 1.0, n: 100, value: 0.5 });
        let r = check_cauchy(&euclid(), &seq, 0.01, &[1.0], 10).unwrap();
        assert!(!r.passed());
        match r.witnesses[0].data {
            WitnessData::Cauchy { p, value, .. } => {
                assert_eq!(p % 2, 1);
                assert!((value - 1.0 / 3.0).abs() < 1e-15);
            }
            ref other => panic!("{other:?}"),
        }
    }

    #[test]
    fn argument_errors() {
        let seq = SequenceSpec::constant(v(&[0.0, 0.0]), 10).unwrap();
        let zero = v(&[0.0, 0.0]);
        assert!(matches!(check_convergence(&euclid(), &seq, &zero, 0.1, &[]), Err(crate::Error::Structural(_))));
        assert!(matches!(check_convergence(&euclid(), &seq, &zero, 1.5, &[1.0]), Err(crate::Error::InputDomain(_))));
        assert!(matches!(check_cauchy(&euclid(), &seq, 0.1, &[1.0], 10), Err(crate::Error::Structural(_))));
        assert!(matches!(check_cauchy(&euclid(), &seq, 0.1, &[-1.0], 2), Err(crate::Error::InputDomain(_))));
    }
}
