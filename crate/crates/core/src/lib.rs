//! Executable checks for fuzzy normed spaces: the fuzzy norm axioms, strict
//! convexity, metric midpoints, fuzzy isometries, and an affine-certification
//! pipeline for isometries that preserve collinearity.

pub mod error;
pub mod fuzzy_norm;
pub mod geometry;
pub mod isometry;
pub mod mazur_ulam;
pub mod replay;
pub mod report;
pub mod sampling;
pub mod search;
pub mod sequences;
pub mod vecspace;

pub use error::{Error, Result};
pub use fuzzy_norm::{FuzzyNorm, NormFamily};
pub use geometry::{MidpointProblem, MidpointSolution};
pub use isometry::MapSpec;
pub use mazur_ulam::{AffineFit, AffinityCertificate, CertificateVerdict, CertifyOptions};
pub use report::{CheckReport, Verdict, Witness, WitnessData};
pub use sampling::SamplePlan;
pub use sequences::SequenceSpec;
pub use vecspace::{CrispNormKind, Tolerance, Vector};
