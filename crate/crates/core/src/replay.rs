//! Re-running recorded witnesses against the objects they were found on.

use crate::error::{structural, Result};
use crate::fuzzy_norm::{self as fz, FuzzyNorm};
use crate::geometry::{verify_midpoint, MidpointProblem};
use crate::isometry::{probe_collinearity, probe_isometry, MapSpec};
use crate::mazur_ulam::{self as mu, AffineFit};
use crate::report::{Witness, WitnessData};
use crate::sequences::{probe_cauchy, probe_convergence, SequenceSpec};
use crate::vecspace::{CrispNormKind, Vector};

/// The objects a witness may refer to. Only the ones its kind needs must be
/// present.
#[derive(Debug, Default, Clone, Copy)]
pub struct ReplayContext<'a> {
    /// The space under test, or the domain of a map.
    pub norm: Option<&'a FuzzyNorm>,
    pub codomain: Option<&'a FuzzyNorm>,
    pub crisp: Option<&'a CrispNormKind>,
    /// The original map `f`; midpoint and linearity witnesses are replayed on
    /// `f - f(0)`.
    pub map: Option<&'a MapSpec>,
    pub sequence: Option<&'a SequenceSpec>,
    pub limit: Option<&'a Vector>,
    pub midpoint: Option<&'a MidpointProblem>,
    pub fit: Option<&'a AffineFit>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Replay {
    /// Same inputs, bit-identical observed values, same violation.
    Reproduced,
    /// The probe no longer fires, or fires with different values.
    Mismatch { recomputed: Option<WitnessData> },
}

impl Replay {
    pub fn reproduced(&self) -> bool {
        matches!(self, Replay::Reproduced)
    }
}

fn need<'a, T: ?Sized>(item: Option<&'a T>, what: &str) -> Result<&'a T> {
    item.ok_or_else(|| structural(format!("replay needs {what}")))
}

pub fn replay(w: &Witness, ctx: &ReplayContext<'_>) -> Result<Replay> {
    let tol = w.tolerance;
    let norm = || need(ctx.norm, "a fuzzy norm");
    let cod = || need(ctx.codomain, "a codomain fuzzy norm");
    let map = || need(ctx.map, "a map");
    let normalized = || map().and_then(mu::normalize);
    let recomputed = match &w.data {
        WitnessData::NonPositiveThreshold { x, a, .. } => fz::probe_n1(norm()?, x, *a, tol)?,
        WitnessData::ZeroNotOne { a, .. } => fz::probe_n2_zero(norm()?, *a, tol)?,
        WitnessData::NonzeroAlwaysOne { x, thresholds, .. } => fz::probe_n2_nonzero(norm()?, x, thresholds, tol)?,
        WitnessData::Scaling { x, scalar, b, .. } => fz::probe_n3(norm()?, x, *scalar, *b, tol)?,
        WitnessData::MinTriangle { x, y, a, b, .. } => fz::probe_n4(norm()?, x, y, *a, *b, tol)?,
        WitnessData::Decreasing { x, a_lo, a_hi, .. } => fz::probe_n5_monotone(norm()?, x, *a_lo, *a_hi, tol)?,
        WitnessData::NoLimit { x, a_big, .. } => fz::probe_n5_limit(norm()?, x, *a_big, tol)?,
        WitnessData::NotUpperSemicontinuous { x, a, .. } => fz::probe_n6(norm()?, x, *a, tol)?,
        WitnessData::StrictConvexity { x, y, a, b, .. } => fz::probe_strict_convexity(norm()?, x, y, *a, *b, tol)?,
        WitnessData::CrispStrictConvexity { u, v, .. } => {
            fz::probe_crisp_strict_convexity(need(ctx.crisp, "a crisp norm kind")?, u, v, tol)?
        }
        WitnessData::Convergence { a, n, .. } => probe_convergence(
            norm()?,
            need(ctx.sequence, "a sequence")?,
            need(ctx.limit, "a limit")?,
            *a,
            *n,
            tol,
        )?,
        WitnessData::Cauchy { a, n, p, .. } => probe_cauchy(norm()?, need(ctx.sequence, "a sequence")?, *a, *n, *p, tol)?,
        WitnessData::Isometry { x, y, a, .. } => probe_isometry(norm()?, cod()?, map()?, x, y, *a, tol)?,
        WitnessData::Collinearity { a, c, t, .. } => probe_collinearity(map()?, a, c, *t, tol)?,
        WitnessData::MidpointPreservation { a, b, .. } => {
            mu::probe_midpoint_preservation(&normalized()?, cod()?, a, b, tol)?
        }
        WitnessData::Additivity { a, b, .. } => mu::probe_additivity(&normalized()?, cod()?, a, b, tol)?,
        WitnessData::RationalHomogeneity { a, q, .. } => {
            mu::probe_rational_homogeneity(&normalized()?, cod()?, a, *q, tol)?
        }
        WitnessData::RealHomogeneity { a, r, .. } => mu::probe_real_homogeneity(&normalized()?, cod()?, a, *r, tol)?,
        WitnessData::AffineResidual { x, .. } => {
            mu::probe_affine_residual(map()?, need(ctx.fit, "an affine fit")?, x, tol)?
        }
        WitnessData::MultipleMidpoints { solutions } => {
            let prob = need(ctx.midpoint, "a midpoint problem")?;
            let mut ok = solutions.len() >= 2;
            for (i, x) in solutions.iter().enumerate() {
                ok &= verify_midpoint(prob, x, tol)?;
                for y in &solutions[..i] {
                    ok &= x.max_abs_diff(y)? > prob.distinctness_threshold();
                }
            }
            ok.then(|| w.data.clone())
        }
    };
    Ok(if recomputed.as_ref() == Some(&w.data) {
        Replay::Reproduced
    } else {
        Replay::Mismatch { recomputed }
    })
}
