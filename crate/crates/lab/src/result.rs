//! The persisted result document.

use dampwave_core::charsolver::SlabReport;
use dampwave_core::damping::{SectorBounds, ValidationReport};
use dampwave_core::diagnostics::{DecayFit, HarauxReport, HarauxWeight, LinfBoundReport, RieszThorinReport};
use dampwave_core::ltv::SignalKind;
use dampwave_core::Trace;
use serde::{Deserialize, Serialize};

use crate::config::{PValue, RunConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub command: String,
    pub passed: bool,
    pub config: RunConfig,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub damping_validation: Option<ValidationReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub runs: Vec<SolverRun>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<Comparison>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<SweepRow>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub version: String,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverName {
    Characteristics,
    Fd,
}

impl SolverName {
    pub fn label(self) -> &'static str {
        match self {
            SolverName::Characteristics => "characteristics",
            SolverName::Fd => "fd",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct History {
    pub p: PValue,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarauxCheck {
    pub weight: HarauxWeight,
    pub report: HarauxReport,
    /// For `pos_square`: the functional must stay below this everywhere.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vanish_limit: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFitCheck {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<DecayFit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RieszThorinCheck {
    pub reports: Vec<RieszThorinReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardCheck {
    pub ratio_limit: f64,
    pub iteration_limit: usize,
    pub max_ratio: f64,
    pub max_iterations: usize,
    pub slabs: Vec<SlabReport>,
    pub passed: bool,
}

/// Each requested check appears exactly once per solver run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Checks {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linf_bound: Option<LinfBoundReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub haraux: Option<Vec<HarauxCheck>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay_fit: Option<DecayFitCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub riesz_thorin: Option<RieszThorinCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub picard: Option<PicardCheck>,
}

impl Checks {
    pub fn passed(&self) -> bool {
        self.linf_bound.as_ref().is_none_or(|r| r.passed())
            && self.haraux.as_ref().is_none_or(|v| v.iter().all(|c| c.passed))
            && self.decay_fit.as_ref().is_none_or(|c| c.passed)
            && self.riesz_thorin.as_ref().is_none_or(|c| c.passed)
            && self.picard.as_ref().is_none_or(|c| c.passed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverRun {
    pub solver: SolverName,
    pub wall_time_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Trace>,
    pub final_time: f64,
    pub histories: Vec<History>,
    pub checks: Checks,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub nx: usize,
    pub l2_distance: f64,
    pub linf_distance: f64,
    /// Previous row's `L²` distance divided by this one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub nx: usize,
    pub times: Vec<f64>,
    pub l2: Vec<f64>,
    pub linf: Vec<f64>,
    pub t_compare: f64,
    pub convergence: Vec<ConvergenceRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_distance: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub index: u64,
    pub max_envelope_ratio: f64,
    pub envelope_violations: usize,
    pub v_violations: usize,
    /// `None` when the trajectory hit zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observed_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateBlock {
    pub dim: usize,
    pub d0: f64,
    pub d1: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sector: Option<SectorBounds>,
    pub c: f64,
    /// Row-major.
    pub p: Vec<Vec<f64>>,
    pub m: f64,
    pub p_norm: f64,
    pub b_norm: f64,
    pub envelope_prefactor: f64,
    pub envelope_rate: f64,
    pub residual: f64,
    pub signal: SignalKind,
    pub seed: u64,
    pub trials: Vec<TrialSummary>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub r: f64,
    pub p: PValue,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}
