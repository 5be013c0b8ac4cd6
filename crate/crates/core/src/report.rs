//! JSON report envelope shared by every CLI command.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::mps::MpsForm;
use crate::protocol::{CloneRunReport, IsometryStep, Mode};
use crate::verify::VerifySummary;

pub const SCHEMA_VERSION: &str = "1.0";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: String,
    /// RFC 3339 timestamp; the only field that differs between identical runs.
    pub generated_at: String,
    pub command: String,
    /// Echo of every flag value used, enough to reproduce the run.
    pub config: serde_json::Value,
    pub payload: Payload,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "kebab-case")]
pub enum Payload {
    Clone(Box<CloneRunReport>),
    Verify(VerifySummary),
    Table(TableDump),
    Mps(MpsDump),
}

impl ReportDocument {
    pub fn new(command: &str, config: serde_json::Value, payload: Payload) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            generated_at: chrono::Utc::now().to_rfc3339(),
            command: command.to_string(),
            config,
            payload,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report types serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("malformed report: {e}")))
    }

    /// Serialized payload alone; stable across runs with the same flags.
    pub fn payload_json(&self) -> String {
        serde_json::to_string_pretty(&self.payload).expect("report types serialize")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableStep {
    /// 1-based step index.
    pub step: usize,
    pub d: usize,
    pub v0: ComplexMatrix,
    pub v1: ComplexMatrix,
    pub isometry_defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableDump {
    pub mode: Mode,
    pub m: usize,
    pub m_eff: usize,
    pub coefficients: Vec<f64>,
    pub steps: Vec<TableStep>,
    pub max_isometry_defect: f64,
}

impl TableDump {
    pub fn new(mode: Mode, m: usize, coefficients: Vec<f64>, steps: &[IsometryStep]) -> Self {
        let steps: Vec<TableStep> = steps
            .iter()
            .enumerate()
            .map(|(k, s)| TableStep {
                step: k + 1,
                d: s.d(),
                v0: s.v0().clone(),
                v1: s.v1().clone(),
                isometry_defect: s.defect(),
            })
            .collect();
        let max_isometry_defect = steps.iter().map(|s| s.isometry_defect).fold(0.0, f64::max);
        Self { mode, m, m_eff: coefficients.len(), coefficients, steps, max_isometry_defect }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MpsDump {
    pub m: usize,
    pub input_state: u8,
    pub n_qubits: usize,
    pub chi: usize,
    pub bond_dims: Vec<usize>,
    /// `Σ λ²` per bond; 1 for a normalized state.
    pub lambda_norms: Vec<f64>,
    pub reconstruction_norm_deviation: f64,
    pub form: MpsForm,
}
