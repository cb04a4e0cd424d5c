//! Finite-dimensional real vectors and the classical norms that induce
//! fuzzy norms.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, structural, Result};

/// Absolute plus relative tolerance used for floating-point equality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-9, rel: 1e-9 }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    pub fn eq(&self, lhs: f64, rhs: f64) -> bool {
        (lhs - rhs).abs() <= self.abs + self.rel * lhs.abs().max(rhs.abs())
    }
}

/// A point of a finite-dimensional real vector space.
///
/// Construction rejects empty coordinate lists and non-finite components, so
/// every `Vector` in circulation has dimension at least one and finite entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(structural("vector must have dimension at least 1"));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(domain(format!(
                "component {i} is not finite ({})",
                coords[i]
            )));
        }
        Ok(Self(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        Self(vec![0.0; dim])
    }

    /// The `i`-th standard basis vector.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = 1.0;
        v
    }

    /// Skips validation; callers guarantee a non-empty finite slice.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty());
        Self(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    fn zip_with(&self, other: &Vector, op: impl Fn(f64, f64) -> f64) -> Result<Vector> {
        check_same_dim(self, other)?;
        Ok(Vector(
            self.0.iter().zip(&other.0).map(|(&a, &b)| op(a, b)).collect(),
        ))
    }

    pub fn add(&self, other: &Vector) -> Result<Vector> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Vector {
        Vector(self.0.iter().map(|&a| c * a).collect())
    }

    /// `(a + b) / 2`, computed componentwise.
    pub fn midpoint(&self, other: &Vector) -> Result<Vector> {
        self.zip_with(other, |a, b| 0.5 * (a + b))
    }

    pub fn dot(&self, other: &Vector) -> Result<f64> {
        check_same_dim(self, other)?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    pub fn max_abs_diff(&self, other: &Vector) -> Result<f64> {
        check_same_dim(self, other)?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = crate::Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Vector::new(coords)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

pub fn check_same_dim(a: &Vector, b: &Vector) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(structural(format!(
            "dimension mismatch: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

pub fn add(a: &Vector, b: &Vector) -> Result<Vector> {
    a.add(b)
}

pub fn subtract(a: &Vector, b: &Vector) -> Result<Vector> {
    a.sub(b)
}

pub fn scale(v: &Vector, c: f64) -> Vector {
    v.scale(c)
}

pub fn midpoint_formula(a: &Vector, b: &Vector) -> Result<Vector> {
    a.midpoint(b)
}

/// Selector for the classical norm underneath a crisp-induced fuzzy norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CrispNormKind {
    Euclidean,
    PNorm { p: f64 },
    MaxNorm,
    WeightedEuclidean { weights: Vec<f64> },
}

impl CrispNormKind {
    /// Checks the parameters and, for weighted norms, that the weight count
    /// matches `dim`.
    pub fn validate(&self, dim: usize) -> Result<()> {
        if dim == 0 {
            return Err(structural("dimension must be at least 1"));
        }
        match self {
            CrispNormKind::PNorm { p } if !(p.is_finite() && *p >= 1.0) => {
                Err(domain(format!("p-norm requires finite p >= 1, got {p}")))
            }
            CrispNormKind::WeightedEuclidean { weights } => {
                if weights.len() != dim {
                    return Err(structural(format!(
                        "weighted norm has {} weights for dimension {dim}",
                        weights.len()
                    )));
                }
                if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
                    return Err(domain(format!("weights must be positive and finite, got {w}")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            CrispNormKind::Euclidean => "euclidean".into(),
            CrispNormKind::PNorm { p } => format!("p_norm(p={p})"),
            CrispNormKind::MaxNorm => "max_norm".into(),
            CrispNormKind::WeightedEuclidean { .. } => "weighted_euclidean".into(),
        }
    }

    /// Norm of a slice that is already known to be finite and of the right
    /// length.
    pub(crate) fn eval(&self, v: &[f64]) -> f64 {
        match self {
            CrispNormKind::Euclidean => v.iter().map(|c| c * c).sum::<f64>().sqrt(),
            CrispNormKind::MaxNorm => v.iter().fold(0.0, |m, c| m.max(c.abs())),
            CrispNormKind::PNorm { p } => {
                if *p == 1.0 {
                    return v.iter().map(|c| c.abs()).sum();
                }
                // Rescale by the largest entry so |c|^p cannot overflow.
                let m = v.iter().fold(0.0, |m: f64, c| m.max(c.abs()));
                if m == 0.0 {
                    return 0.0;
                }
                m * v.iter().map(|c| (c.abs() / m).powf(*p)).sum::<f64>().powf(1.0 / p)
            }
            CrispNormKind::WeightedEuclidean { weights } => v
                .iter()
                .zip(weights)
                .map(|(c, w)| w * c * c)
                .sum::<f64>()
                .sqrt(),
        }
    }
}

/// `‖v‖` for the selected norm.
pub fn crisp_norm(v: &Vector, kind: &CrispNormKind) -> Result<f64> {
    if !v.is_finite() {
        return Err(domain("vector has a non-finite component"));
    }
    kind.validate(v.dim())?;
    Ok(kind.eval(v.coords()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn norm_examples() {
        assert_eq!(crisp_norm(&v(&[3.0, 4.0]), &CrispNormKind::Euclidean).unwrap(), 5.0);
        assert_eq!(crisp_norm(&v(&[1.0, -3.0]), &CrispNormKind::MaxNorm).unwrap(), 3.0);
        for kind in [
            CrispNormKind::Euclidean,
            CrispNormKind::MaxNorm,
            CrispNormKind::PNorm { p: 1.0 },
            CrispNormKind::PNorm { p: 3.5 },
            CrispNormKind::WeightedEuclidean { weights: vec![2.0, 0.5] },
        ] {
            assert_eq!(crisp_norm(&v(&[0.0, 0.0]), &kind).unwrap(), 0.0);
        }
    }

    #[test]
    fn vector_op_examples() {
        assert_eq!(midpoint_formula(&v(&[0.0, 0.0]), &v(&[2.0, 0.0])).unwrap(), v(&[1.0, 0.0]));
        assert_eq!(scale(&v(&[1.0, 2.0]), 0.0), v(&[0.0, 0.0]));
        assert_eq!(subtract(&v(&[1.0, 1.0]), &v(&[1.0, 1.0])).unwrap(), v(&[0.0, 0.0]));
        assert_eq!(add(&v(&[1.0, 1.0]), &v(&[0.5, -1.0])).unwrap(), v(&[1.5, 0.0]));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(Vector::new(vec![]), Err(crate::Error::Structural(_))));
        assert!(matches!(Vector::new(vec![1.0, f64::NAN]), Err(crate::Error::InputDomain(_))));
        assert!(matches!(
            add(&v(&[1.0]), &v(&[1.0, 2.0])),
            Err(crate::Error::Structural(_))
        ));
        assert!(CrispNormKind::PNorm { p: 0.5 }.validate(2).is_err());
        assert!(CrispNormKind::WeightedEuclidean { weights: vec![1.0, -1.0] }
            .validate(2)
            .is_err());
        assert!(CrispNormKind::WeightedEuclidean { weights: vec![1.0] }
            .validate(2)
            .is_err());
    }
}
