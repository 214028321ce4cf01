//! Experiment configuration, parameter sweeps and reports that set the
//! analytic predicates of [`crate::ranges`] against numerical evidence.

mod config;
mod experiments;
mod report;

pub use config::{Cell, ExperimentConfig, ExperimentKind};
pub use experiments::{
    fit_slope, maximal_range_evidence, reduction_ratio, run, run_embedding_experiment,
    run_equivalence_experiment, run_extrapolation_experiment, run_maximal_range_experiment,
    run_norm_experiment, run_scaling_law_experiment, witness_catalog, GrowthClass, WitnessEvidence,
};
pub use report::{run_report, summarize, write_csv, Counts, CSV_HEADER};

use serde::Serialize;

/// Outcome of comparing numerics with the analytic verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Agreement {
    Agree,
    Disagree,
    /// Evidence changed between refinements, sat between the thresholds,
    /// depended on the domain size, or the row is exploratory.
    Unstable,
    Trivial,
    /// Preconditions of the tested statement fail; no numerics were run.
    Rejected,
}

impl Agreement {
    pub fn label(&self) -> &'static str {
        match self {
            Agreement::Agree => "agree",
            Agreement::Disagree => "disagree",
            Agreement::Unstable => "unstable",
            Agreement::Trivial => "trivial",
            Agreement::Rejected => "rejected",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub experiment: ExperimentKind,
    pub n: usize,
    pub p: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub beta: f64,
    pub alpha: f64,
    pub witness: String,
    /// Cells per axis at the finest level.
    pub refinement: usize,
    pub value: f64,
    pub slope: f64,
    pub analytic_verdict: String,
    pub citation: String,
    pub agreement: Agreement,
    /// The row's statistic at each refinement level, coarsest first.
    pub evidence: Vec<f64>,
    pub note: String,
}
