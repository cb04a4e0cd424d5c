//! Seeded sample streams shared by all checkers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::vecspace::Vector;

/// Deterministic sampling configuration. Identical plans yield identical
/// sample streams.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplePlan {
    pub seed: u64,
    pub n_points: usize,
    /// Radius of the ball points are drawn from.
    pub point_radius: f64,
    /// Positive interval thresholds are drawn from, log-uniformly.
    pub a_range: (f64, f64),
    pub n_thresholds: usize,
    pub equality_tol: f64,
    /// Slack for the large-threshold limit probe of N5.
    pub limit_tol: f64,
    /// Number of local-search starts used by the midpoint solver.
    pub n_starts: usize,
}

impl Default for SamplePlan {
    fn default() -> Self {
        Self {
            seed: 0,
            n_points: 200,
            point_radius: 1.0,
            a_range: (0.01, 100.0),
            n_thresholds: 8,
            equality_tol: 1e-9,
            limit_tol: 1e-6,
            n_starts: 64,
        }
    }
}

impl SamplePlan {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points == 0 || self.n_thresholds == 0 {
            return Err(domain("n_points and n_thresholds must be positive"));
        }
        if !(self.point_radius.is_finite() && self.point_radius > 0.0) {
            return Err(domain(format!(
                "point_radius must be positive, got {}",
                self.point_radius
            )));
        }
        let (lo, hi) = self.a_range;
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi >= lo) {
            return Err(domain(format!(
                "a_range must be a positive interval, got ({lo}, {hi})"
            )));
        }
        for (name, t) in [("equality_tol", self.equality_tol), ("limit_tol", self.limit_tol)] {
            if !(t.is_finite() && t > 0.0) {
                return Err(domain(format!("{name} must be positive, got {t}")));
            }
        }
        Ok(())
    }

    pub fn sampler(&self) -> Sampler {
        Sampler::new(self.seed)
    }

    /// Sorted, log-uniform threshold grid drawn from its own stream so that it
    /// does not shift the point stream.
    pub fn thresholds(&self) -> Vec<f64> {
        let mut s = Sampler::new(self.seed ^ 0x7468_7265_7368_6f6c);
        let (lo, hi) = self.a_range;
        let mut grid: Vec<f64> = (0..self.n_thresholds).map(|_| s.log_uniform(lo, hi)).collect();
        grid.sort_by(f64::total_cmp);
        grid
    }
}

/// Thin wrapper over a ChaCha stream with the draws the checkers need.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        if lo == hi {
            return lo;
        }
        self.rng.gen_range(lo..hi)
    }

    pub fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.uniform(lo.ln(), hi.ln()).exp().clamp(lo, hi)
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    /// Uniform draw from the closed ball of `radius` around the origin.
    pub fn point_in_ball(&mut self, dim: usize, radius: f64) -> Vector {
        loop {
            let dir: Vec<f64> = (0..dim).map(|_| self.normal()).collect();
            let len = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
            if len < 1e-12 {
                continue;
            }
            let r = radius * self.uniform(0.0, 1.0).powf(1.0 / dim as f64);
            return Vector::from_raw(dir.into_iter().map(|c| c * r / len).collect());
        }
    }

    pub fn point_around(&mut self, center: &Vector, radius: f64) -> Vector {
        let offset = self.point_in_ball(center.dim(), radius);
        Vector::from_raw(
            center
                .coords()
                .iter()
                .zip(offset.coords())
                .map(|(c, o)| c + o)
                .collect(),
        )
    }

    pub fn points(&mut self, dim: usize, radius: f64, n: usize) -> Vec<Vector> {
        (0..n).map(|_| self.point_in_ball(dim, radius)).collect()
    }
}

/// Fixed points every checker probes before its random samples: the origin
/// and `±radius` along each axis.
pub fn anchor_points(dim: usize, radius: f64) -> Vec<Vector> {
    let mut out = vec![Vector::zeros(dim)];
    for i in 0..dim {
        out.push(Vector::basis(dim, i).scale(radius));
        out.push(Vector::basis(dim, i).scale(-radius));
    }
    out
}
