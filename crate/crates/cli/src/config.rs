//! Run configuration: spaces, maps, sequences, midpoint problems and the
//! sampling plan, read from a JSON document.

use std::path::Path;

use fuzzynorm::isometry::{make_perturbed_isometry, make_rigid_map, make_scaling, make_sine_curve_map};
use fuzzynorm::{
    CertifyOptions, CrispNormKind, FuzzyNorm, MapSpec, MidpointProblem, SamplePlan, SequenceSpec, Vector,
};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub dimension: usize,
    /// One of the shipped families, `crisp_induced` by default.
    #[serde(default = "default_family")]
    pub family: String,
    #[serde(default = "default_norm")]
    pub norm: CrispNormKind,
}

fn default_family() -> String {
    "crisp_induced".into()
}

fn default_norm() -> CrispNormKind {
    CrispNormKind::Euclidean
}

impl SpaceConfig {
    pub fn build(&self) -> Result<FuzzyNorm, CliError> {
        FuzzyNorm::named(&self.family, self.norm.clone(), self.dimension)
            .map_err(|e| CliError::config(format!("space: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapConfig {
    Identity { dim: usize },
    Rigid { seed: u64, dim: usize, translation: Vec<f64> },
    Scaling { dim: usize, factor: f64 },
    SineCurve,
    PerturbedIsometry { seed: u64, dim: usize, magnitude: f64 },
    /// `x ↦ L x + offset` with `L` given row by row.
    Affine { linear: Vec<Vec<f64>>, offset: Vec<f64> },
}

impl MapConfig {
    pub fn build(&self) -> Result<MapSpec, CliError> {
        let map = match self {
            MapConfig::Identity { dim } => MapSpec::identity(*dim),
            MapConfig::Rigid { seed, dim, translation } => {
                make_rigid_map(*seed, *dim, vector(translation, "map.translation")?)
            }
            MapConfig::Scaling { dim, factor } => make_scaling(*dim, *factor),
            MapConfig::SineCurve => Ok(make_sine_curve_map()),
            MapConfig::PerturbedIsometry { seed, dim, magnitude } => make_perturbed_isometry(*seed, *dim, *magnitude),
            MapConfig::Affine { linear, offset } => {
                let rows = linear.len();
                let cols = linear.first().map_or(0, Vec::len);
                if rows == 0 || cols == 0 || linear.iter().any(|r| r.len() != cols) {
                    return Err(CliError::config("map.linear must be a non-empty rectangular matrix"));
                }
                MapSpec::affine("affine", DMatrix::from_fn(rows, cols, |i, j| linear[i][j]), vector(offset, "map.offset")?)
            }
        };
        map.map_err(|e| CliError::config(format!("map: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MidpointConfig {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceKind {
    /// `base + direction / n`
    Drift,
    /// `base`
    Constant,
    /// `(-1)^n direction`
    Alternating,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceConfig {
    pub kind: SequenceKind,
    #[serde(default)]
    pub base: Option<Vec<f64>>,
    #[serde(default)]
    pub direction: Option<Vec<f64>>,
    pub n_max: usize,
    /// Candidate limit for `check-convergence`.
    #[serde(default)]
    pub limit: Option<Vec<f64>>,
    pub eps: f64,
    pub a_grid: Vec<f64>,
    #[serde(default = "default_p_max")]
    pub p_max: usize,
}

fn default_p_max() -> usize {
    10
}

impl SequenceConfig {
    pub fn build(&self) -> Result<SequenceSpec, CliError> {
        let field = |v: &Option<Vec<f64>>, name: &str| -> Result<Vector, CliError> {
            vector(
                v.as_ref()
                    .ok_or_else(|| CliError::config(format!("sequence.{name} is required for {:?}", self.kind)))?,
                &format!("sequence.{name}"),
            )
        };
        let seq = match self.kind {
            SequenceKind::Drift => SequenceSpec::drift(field(&self.base, "base")?, field(&self.direction, "direction")?, self.n_max),
            SequenceKind::Constant => SequenceSpec::constant(field(&self.base, "base")?, self.n_max),
            SequenceKind::Alternating => SequenceSpec::alternating(field(&self.direction, "direction")?, self.n_max),
        };
        seq.map_err(|e| CliError::config(format!("sequence: {e}")))
    }

    pub fn limit(&self) -> Result<Vector, CliError> {
        vector(
            self.limit
                .as_ref()
                .ok_or_else(|| CliError::config("sequence.limit is required for check-convergence"))?,
            "sequence.limit",
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub space: SpaceConfig,
    /// Codomain for map commands; the domain space is reused when absent.
    #[serde(default)]
    pub codomain: Option<SpaceConfig>,
    #[serde(default)]
    pub plan: SamplePlan,
    #[serde(default)]
    pub map: Option<MapConfig>,
    #[serde(default)]
    pub midpoint: Option<MidpointConfig>,
    #[serde(default)]
    pub sequence: Option<SequenceConfig>,
    #[serde(default)]
    pub certify: CertifyOptions,
    /// Tolerance of `check-collinearity`; `certify.collinear_tol` governs
    /// certification.
    #[serde(default = "default_collinear_tol")]
    pub collinear_tol: f64,
}

fn default_collinear_tol() -> f64 {
    1e-9
}

impl Config {
    pub fn from_json(text: &str, origin: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::config(format!("{origin}: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn domain(&self) -> Result<FuzzyNorm, CliError> {
        self.space.build()
    }

    pub fn codomain(&self) -> Result<FuzzyNorm, CliError> {
        self.codomain.as_ref().unwrap_or(&self.space).build()
    }

    pub fn map(&self) -> Result<MapSpec, CliError> {
        self.map
            .as_ref()
            .ok_or_else(|| CliError::config("`map` section is required for this command"))?
            .build()
    }

    pub fn sequence(&self) -> Result<&SequenceConfig, CliError> {
        self.sequence
            .as_ref()
            .ok_or_else(|| CliError::config("`sequence` section is required for this command"))
    }

    pub fn midpoint_problem(&self) -> Result<MidpointProblem, CliError> {
        let m = self
            .midpoint
            .as_ref()
            .ok_or_else(|| CliError::config("`midpoint` section is required for find-midpoint"))?;
        MidpointProblem::new(self.domain()?, vector(&m.a, "midpoint.a")?, vector(&m.b, "midpoint.b")?, m.s)
            .map_err(|e| CliError::config(format!("midpoint: {e}")))
    }
}

fn vector(coords: &[f64], field: &str) -> Result<Vector, CliError> {
    Vector::new(coords.to_vec()).map_err(|e| CliError::config(format!("{field}: {e}")))
}
