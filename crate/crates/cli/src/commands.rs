//! Command dispatch and the report document.

use std::collections::BTreeMap;
use std::time::Instant;

use clap::Subcommand;
use fuzzynorm::fuzzy_norm::{check_axioms, check_crisp_strict_convexity, check_strict_convexity};
use fuzzynorm::geometry::find_midpoints;
use fuzzynorm::isometry::{check_collinearity_preservation, check_isometry};
use fuzzynorm::mazur_ulam::certify_affine;
use fuzzynorm::replay::{replay, Replay, ReplayContext};
use fuzzynorm::report::{ClauseReport, ReportBuilder};
use fuzzynorm::sequences::{check_cauchy, check_convergence};
use fuzzynorm::{
    AffinityCertificate, CertificateVerdict, CheckReport, MidpointSolution, Verdict, Witness, WitnessData,
};
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Sample the fuzzy norm axioms N1–N6.
    CheckAxioms,
    /// Search for violations of fuzzy strict convexity.
    CheckStrictConvexity,
    /// Search for equality cases of the crisp triangle inequality.
    CheckCrispStrictConvexity,
    /// Truncated convergence check of a shipped sequence.
    CheckConvergence,
    /// Truncated Cauchy check of a shipped sequence.
    CheckCauchy,
    /// Solve the metric-midpoint equations.
    FindMidpoint,
    /// Check that a map preserves the fuzzy norm of differences.
    VerifyIsometry,
    /// Check that a map sends collinear triples to collinear triples.
    CheckCollinearity,
    /// Run the affine-certification pipeline on a map.
    CertifyAffine,
    /// Re-run every witness of an earlier report.
    VerifyWitness,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::CheckAxioms => "check-axioms",
            Command::CheckStrictConvexity => "check-strict-convexity",
            Command::CheckCrispStrictConvexity => "check-crisp-strict-convexity",
            Command::CheckConvergence => "check-convergence",
            Command::CheckCauchy => "check-cauchy",
            Command::FindMidpoint => "find-midpoint",
            Command::VerifyIsometry => "verify-isometry",
            Command::CheckCollinearity => "check-collinearity",
            Command::CertifyAffine => "certify-affine",
            Command::VerifyWitness => "verify-witness",
        }
    }
}

/// Command-specific payload beyond the clause verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Details {
    None,
    Midpoints(MidpointSolution),
    Certificate(Box<AffinityCertificate>),
    Replay(ReplaySummary),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplaySummary {
    pub source_command: String,
    pub replayed: usize,
    pub reproduced: usize,
    pub mismatches: Vec<Mismatch>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mismatch {
    pub index: usize,
    pub clause: String,
    pub recomputed: Option<WitnessData>,
}

/// The machine-readable report. Everything except `runtime_ms` is a pure
/// function of the configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub command: String,
    #[serde(rename = "config-echo")]
    pub config_echo: Config,
    pub verdict: Verdict,
    pub clauses: Vec<ClauseReport>,
    pub witnesses: Vec<Witness>,
    pub samples_used: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    pub details: Details,
    pub runtime_ms: u64,
}

impl ReportDoc {
    fn new(command: Command, config: &Config) -> Self {
        let mut tolerances = BTreeMap::new();
        tolerances.insert("equality_tol".to_string(), config.plan.equality_tol);
        tolerances.insert("limit_tol".to_string(), config.plan.limit_tol);
        Self {
            command: command.name().to_string(),
            config_echo: config.clone(),
            verdict: Verdict::Pass,
            clauses: Vec::new(),
            witnesses: Vec::new(),
            samples_used: 0,
            tolerances,
            notes: Vec::new(),
            details: Details::None,
            runtime_ms: 0,
        }
    }

    fn absorb(&mut self, report: &CheckReport) {
        self.clauses.extend(report.clauses.iter().cloned());
        self.witnesses.extend(report.witnesses.iter().cloned());
        self.samples_used += report.samples_used;
        self.notes.extend(report.notes.iter().cloned());
        if !self.witnesses.is_empty() {
            self.verdict = Verdict::Fail;
        }
    }

    fn tolerance(&mut self, name: &str, value: f64) {
        self.tolerances.insert(name.to_string(), value);
    }

    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
        }
    }

    /// Short human-readable account for the terminal.
    pub fn summary(&self) -> String {
        let mut out = format!(
            "{}: {} ({} samples, {} witnesses)\n",
            self.command,
            match self.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
            },
            self.samples_used,
            self.witnesses.len()
        );
        for c in &self.clauses {
            out.push_str(&format!(
                "  {:<26} {:<4} samples={} violations={}\n",
                c.id,
                if c.verdict.is_pass() { "ok" } else { "FAIL" },
                c.samples,
                c.violations
            ));
        }
        match &self.details {
            Details::Midpoints(sol) => {
                out.push_str(&format!(
                    "  {} solution(s), unique_within_probe={}\n",
                    sol.solutions.len(),
                    sol.unique_within_probe
                ));
            }
            Details::Certificate(cert) => {
                out.push_str(&format!("  certificate verdict: {:?}\n", cert.verdict));
            }
            Details::Replay(r) => {
                out.push_str(&format!("  reproduced {}/{} witnesses\n", r.reproduced, r.replayed));
            }
            Details::None => {}
        }
        out
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub require_unique: bool,
    /// Earlier report, for `verify-witness`.
    pub source_report: Option<ReportDoc>,
}

pub fn execute(command: Command, config: &Config, opts: &RunOptions) -> Result<ReportDoc, CliError> {
    let started = Instant::now();
    let mut doc = ReportDoc::new(command, config);
    let plan = &config.plan;
    match command {
        Command::CheckAxioms => doc.absorb(&check_axioms(&config.domain()?, plan)?),
        Command::CheckStrictConvexity => doc.absorb(&check_strict_convexity(&config.domain()?, plan)?),
        Command::CheckCrispStrictConvexity => {
            let n = config.domain()?;
            let kind = n
                .crisp_kind()
                .ok_or_else(|| CliError::config("check-crisp-strict-convexity needs a crisp_induced space"))?;
            doc.absorb(&check_crisp_strict_convexity(kind, n.dimension(), plan)?);
        }
        Command::CheckConvergence => {
            let s = config.sequence()?;
            doc.tolerance("eps", s.eps);
            doc.absorb(&check_convergence(&config.domain()?, &s.build()?, &s.limit()?, s.eps, &s.a_grid)?);
        }
        Command::CheckCauchy => {
            let s = config.sequence()?;
            doc.tolerance("eps", s.eps);
            doc.absorb(&check_cauchy(&config.domain()?, &s.build()?, s.eps, &s.a_grid, s.p_max)?);
        }
        Command::FindMidpoint => {
            let prob = config.midpoint_problem()?;
            let sol = find_midpoints(&prob, plan)?;
            let mut rb = ReportBuilder::new();
            let found = rb.clause("midpoint_found", plan.equality_tol);
            rb.record(found, None);
            if sol.solutions.is_empty() {
                rb.note("no start converged to a solution");
            }
            if opts.require_unique {
                let unique = rb.clause("midpoint_uniqueness", plan.equality_tol);
                rb.record(
                    unique,
                    (!sol.unique_within_probe && sol.solutions.len() >= 2).then(|| WitnessData::MultipleMidpoints {
                        solutions: sol.solutions.clone(),
                    }),
                );
            }
            doc.tolerance("distinctness", prob.distinctness_threshold());
            doc.absorb(&rb.finish());
            doc.details = Details::Midpoints(sol);
        }
        Command::VerifyIsometry => {
            doc.absorb(&check_isometry(&config.domain()?, &config.codomain()?, &config.map()?, plan)?)
        }
        Command::CheckCollinearity => {
            doc.tolerance("collinear_tol", config.collinear_tol);
            doc.absorb(&check_collinearity_preservation(&config.map()?, plan, config.collinear_tol)?);
        }
        Command::CertifyAffine => {
            let opts = &config.certify;
            doc.tolerance("cert_tol", opts.cert_tol);
            doc.tolerance("collinear_tol", opts.collinear_tol);
            doc.tolerance("check_tol", opts.check_tol);
            let cert = certify_affine(&config.map()?, &config.domain()?, &config.codomain()?, plan, opts)?;
            for report in cert.reports() {
                doc.absorb(report);
            }
            // A certificate that is not `certified_affine` always carries a witness.
            doc.verdict = if cert.verdict == CertificateVerdict::CertifiedAffine {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            doc.details = Details::Certificate(Box::new(cert));
        }
        Command::VerifyWitness => {
            let source = opts
                .source_report
                .as_ref()
                .ok_or_else(|| CliError::config("verify-witness needs --report"))?;
            verify_witnesses(&mut doc, config, source)?;
        }
    }
    doc.runtime_ms = started.elapsed().as_millis() as u64;
    Ok(doc)
}

/// Replays each witness of `source` against objects rebuilt from `config`.
fn verify_witnesses(doc: &mut ReportDoc, config: &Config, source: &ReportDoc) -> Result<(), CliError> {
    let norm = config.domain().ok();
    let codomain = config.codomain().ok();
    let map = config.map().ok();
    let sequence = config.sequence().ok().map(|s| s.build()).transpose()?;
    let limit = config.sequence().ok().and_then(|s| s.limit().ok());
    let midpoint = config.midpoint.as_ref().map(|_| config.midpoint_problem()).transpose()?;
    let fit = match &source.details {
        Details::Certificate(cert) => cert.fit.clone(),
        _ => None,
    };
    let ctx = ReplayContext {
        norm: norm.as_ref(),
        codomain: codomain.as_ref(),
        crisp: norm.as_ref().and_then(|n| n.crisp_kind()),
        map: map.as_ref(),
        sequence: sequence.as_ref(),
        limit: limit.as_ref(),
        midpoint: midpoint.as_ref(),
        fit: fit.as_ref(),
    };
    let mut rb = ReportBuilder::new();
    let clause = rb.clause("witness_replay", 0.0);
    let mut summary = ReplaySummary {
        source_command: source.command.clone(),
        replayed: 0,
        reproduced: 0,
        mismatches: Vec::new(),
    };
    let mut unreproduced = Vec::new();
    for (index, w) in source.witnesses.iter().enumerate() {
        summary.replayed += 1;
        match replay(w, &ctx)? {
            Replay::Reproduced => {
                summary.reproduced += 1;
                rb.record(clause, None);
            }
            Replay::Mismatch { recomputed } => {
                summary.mismatches.push(Mismatch {
                    index,
                    clause: w.clause.clone(),
                    recomputed,
                });
                unreproduced.push(w.clone());
                rb.record(clause, None);
            }
        }
    }
    let report = rb.finish();
    doc.clauses = report.clauses;
    doc.samples_used = report.samples_used;
    doc.witnesses = unreproduced;
    if !doc.witnesses.is_empty() {
        doc.clauses[0].verdict = Verdict::Fail;
        doc.clauses[0].violations = doc.witnesses.len() as u64;
        doc.verdict = Verdict::Fail;
    }
    doc.notes.push(format!(
        "replayed {} witnesses from `{}`",
        summary.replayed, summary.source_command
    ));
    doc.details = Details::Replay(summary);
    Ok(())
}
