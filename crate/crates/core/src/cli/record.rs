//! The JSON record written next to every command's outputs.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::cluster::ClusterCount;
use crate::solver::{ErrorModel, LrrSolution, SolverOptions};

/// Bumped whenever a field changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

/// Metric keys present in every record.
pub const STANDARD_METRICS: [&str; 4] = ["accuracy", "auc", "recovery_error", "k_hat"];

/// Everything a command was run with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: String,
    pub input: Option<PathBuf>,
    pub dictionary: Option<PathBuf>,
    pub truth: Option<PathBuf>,
    pub figure: Option<String>,
    pub error_model: Option<ErrorModel>,
    pub solver: Option<SolverOptions>,
    pub k: Option<ClusterCount>,
    pub tau: Option<f64>,
    pub delta: Option<f64>,
    pub seed: u64,
    pub normalize: bool,
    pub unit_columns: bool,
    pub header: bool,
    pub output: PathBuf,
}

/// A metric value, or `null` with the reason it is missing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub value: Option<f64>,
    pub reason: Option<String>,
}

impl Metric {
    pub fn value(v: f64) -> Self {
        Metric {
            value: Some(v),
            reason: None,
        }
    }

    pub fn missing(reason: impl Into<String>) -> Self {
        Metric {
            value: None,
            reason: Some(reason.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverDiagnostics {
    pub iterations: usize,
    pub converged: bool,
    pub primal_residual: f64,
    pub coupling_residual: f64,
    pub objective: f64,
    pub objective_trace: Vec<f64>,
    pub reduced: bool,
}

impl From<&LrrSolution> for SolverDiagnostics {
    fn from(s: &LrrSolution) -> Self {
        SolverDiagnostics {
            iterations: s.iterations,
            converged: s.converged,
            primal_residual: s.final_residuals.0,
            coupling_residual: s.final_residuals.1,
            objective: s.objective,
            objective_trace: s.objective_trace.clone(),
            reduced: s.reduced,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub solver: Option<SolverDiagnostics>,
    pub metrics: BTreeMap<String, Metric>,
    pub labels: Option<Vec<usize>>,
    pub outliers: Option<Vec<usize>>,
    /// Output files written alongside the record, by role.
    pub files: BTreeMap<String, String>,
    pub timing: Timing,
}

impl ResultRecord {
    /// A record with every standard metric null for `reason`.
    pub fn new(config: ExperimentConfig, reason: &str) -> Self {
        let metrics = STANDARD_METRICS
            .iter()
            .map(|k| (k.to_string(), Metric::missing(reason)))
            .collect();
        ResultRecord {
            schema_version: SCHEMA_VERSION,
            config,
            solver: None,
            metrics,
            labels: None,
            outliers: None,
            files: BTreeMap::new(),
            timing: Timing { seconds: 0.0 },
        }
    }

    pub fn set(&mut self, key: &str, metric: Metric) {
        self.metrics.insert(key.to_string(), metric);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("record is serializable");
        s.push('\n');
        s
    }
}
