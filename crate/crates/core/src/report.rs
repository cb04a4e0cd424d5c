//! Structured verdicts with self-contained witnesses.

use serde::{Deserialize, Serialize};

use crate::vecspace::Vector;

/// Witnesses kept per clause; further violations are only counted.
pub const MAX_WITNESSES_PER_CLAUSE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClauseReport {
    pub id: String,
    pub verdict: Verdict,
    pub samples: u64,
    /// Violations seen, including those beyond the witness cap.
    pub violations: u64,
}

/// The concrete inputs (and the values observed at them) that violate a
/// clause. Each variant carries enough to re-run the probe that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessData {
    /// N1: a non-positive threshold with a nonzero value.
    NonPositiveThreshold { x: Vector, a: f64, value: f64 },
    /// N2 at the origin: a positive threshold where the value is not 1.
    ZeroNotOne { x: Vector, a: f64, value: f64 },
    /// N2 away from the origin: every probed threshold gives 1.
    NonzeroAlwaysOne { x: Vector, thresholds: Vec<f64>, min_value: f64 },
    /// N3: `N(c x, b)` differs from `N(x, b / |c|)`.
    Scaling { x: Vector, scalar: f64, b: f64, scaled_value: f64, rescaled_value: f64 },
    /// N4: `N(x + y, a + b) < min(N(x, a), N(y, b))`.
    MinTriangle { x: Vector, y: Vector, a: f64, b: f64, sum_value: f64, min_value: f64 },
    /// N5: the value drops between two increasing thresholds.
    Decreasing { x: Vector, a_lo: f64, a_hi: f64, value_lo: f64, value_hi: f64 },
    /// N5: the value at a very large threshold stays away from 1.
    NoLimit { x: Vector, a_big: f64, value: f64 },
    /// N6: nearby probes sit above the value.
    NotUpperSemicontinuous { x: Vector, a: f64, value: f64, limsup_estimate: f64 },
    /// Fuzzy strict convexity: both hypotheses hold yet `(x, a) != (y, b)`.
    StrictConvexity { x: Vector, y: Vector, a: f64, b: f64, sum_value: f64, x_value: f64, y_value: f64 },
    /// Crisp strict convexity: `‖u + v‖ = ‖u‖ + ‖v‖` for non-parallel `u, v`.
    CrispStrictConvexity { u: Vector, v: Vector, sum_norm: f64, u_norm: f64, v_norm: f64 },
    Convergence { a: f64, n: usize, value: f64 },
    Cauchy { a: f64, n: usize, p: usize, value: f64 },
    Isometry { x: Vector, y: Vector, a: f64, domain_value: f64, codomain_value: f64 },
    /// Images of the collinear triple `(a, c + t (a - c), c)` are not collinear.
    Collinearity { a: Vector, c: Vector, t: f64, image_a: Vector, image_b: Vector, image_c: Vector, residual: f64 },
    MidpointPreservation { a: Vector, b: Vector, defect: f64 },
    Additivity { a: Vector, b: Vector, defect: f64 },
    RationalHomogeneity { a: Vector, q: f64, defect: f64 },
    /// `h(r a) != r h(a)`; `r_prime` is the factor with `h(r a) = r' h(a)`
    /// when the two images are parallel.
    RealHomogeneity { a: Vector, r: f64, defect: f64, r_prime: Option<f64> },
    AffineResidual { x: Vector, image: Vector, prediction: Vector, defect: f64 },
    MultipleMidpoints { solutions: Vec<Vector> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub clause: String,
    /// Tolerance the violation was judged at.
    pub tolerance: f64,
    pub data: WitnessData,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub verdict: Verdict,
    pub clauses: Vec<ClauseReport>,
    pub witnesses: Vec<Witness>,
    pub samples_used: u64,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.verdict.is_pass()
    }

    pub fn clause(&self, id: &str) -> Option<&ClauseReport> {
        self.clauses.iter().find(|c| c.id == id)
    }

    pub fn witnesses_for<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a Witness> + 'a {
        self.witnesses.iter().filter(move |w| w.clause == id)
    }
}

/// Accumulates clause outcomes in sample order.
#[derive(Debug, Default)]
pub struct ReportBuilder {
    clauses: Vec<ClauseReport>,
    tolerances: Vec<f64>,
    witnesses: Vec<Witness>,
    notes: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct ClauseId(usize);

impl ReportBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn clause(&mut self, id: &str, tolerance: f64) -> ClauseId {
        self.clauses.push(ClauseReport {
            id: id.to_string(),
            verdict: Verdict::Pass,
            samples: 0,
            violations: 0,
        });
        self.tolerances.push(tolerance);
        ClauseId(self.clauses.len() - 1)
    }

    /// Records one probe; `Some` marks a violation.
    pub fn record(&mut self, clause: ClauseId, outcome: Option<WitnessData>) {
        let tolerance = self.tolerances[clause.0];
        self.record_at(clause, tolerance, outcome);
    }

    /// As [`record`](Self::record), for probes judged at a clause-specific
    /// tolerance.
    pub fn record_at(&mut self, clause: ClauseId, tolerance: f64, outcome: Option<WitnessData>) {
        let entry = &mut self.clauses[clause.0];
        entry.samples += 1;
        if let Some(data) = outcome {
            entry.verdict = Verdict::Fail;
            entry.violations += 1;
            if entry.violations as usize <= MAX_WITNESSES_PER_CLAUSE {
                self.witnesses.push(Witness {
                    clause: entry.id.clone(),
                    tolerance,
                    data,
                });
            }
        }
    }

    pub fn has_violation(&self, clause: ClauseId) -> bool {
        self.clauses[clause.0].violations > 0
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn finish(self) -> CheckReport {
        let samples_used = self.clauses.iter().map(|c| c.samples).sum();
        let verdict = if self.witnesses.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        CheckReport {
            verdict,
            clauses: self.clauses,
            witnesses: self.witnesses,
            samples_used,
            notes: self.notes,
        }
    }
}
