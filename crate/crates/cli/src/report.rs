//! The JSON run report.

use std::collections::BTreeMap;

use serde::Serialize;
use tpbvp_core::catalog::BreakpointCheck;
use tpbvp_core::certifier::Certificate;
use tpbvp_core::constants::ConstantsReport;
use tpbvp_core::linear::ResidualReport;
use tpbvp_core::nonlinear::{FoundSolution, Label, SearchSummary, Source, Status};
use tpbvp_core::problem::HypothesisReport;
use tpbvp_core::Number;

use crate::config::{Mode, RunConfig};

pub const SCHEMA_VERSION: &str = "1.0";

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema_version: &'static str,
    pub mode: Mode,
    /// The effective configuration, command-line overrides included.
    pub config: RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypothesis: Option<HypothesisReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub breakpoints: Vec<BreakpointReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constants: Option<ConstantsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<ThresholdsUsed>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solutions: Option<Vec<SolutionSummary>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search_summary: Option<SearchSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSummary>,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub messages: Vec<String>,
    /// Wall time per stage in seconds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<BTreeMap<String, f64>>,
}

impl RunReport {
    pub fn new(mode: Mode, config: RunConfig) -> RunReport {
        RunReport {
            schema_version: SCHEMA_VERSION,
            mode,
            config,
            hypothesis: None,
            breakpoints: Vec::new(),
            constants: None,
            thresholds: None,
            certificate: None,
            solutions: None,
            search_summary: None,
            sweep: None,
            exit_code: 0,
            messages: Vec::new(),
            timing: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BreakpointReport {
    pub at: f64,
    pub left: f64,
    pub right: f64,
    pub gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_gap: Option<String>,
    pub continuous: bool,
}

impl From<&BreakpointCheck> for BreakpointReport {
    fn from(c: &BreakpointCheck) -> Self {
        BreakpointReport {
            at: c.at,
            left: c.left,
            right: c.right,
            gap: c.gap,
            exact_gap: c.exact_gap.as_ref().map(|g| g.to_string()),
            continuous: c.is_continuous(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdSource {
    Config,
    CommandLine,
    Search,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThresholdsUsed {
    pub source: ThresholdSource,
    pub a: Number,
    pub b: Number,
    pub c: Number,
    /// `b / gamma`
    pub d: Number,
    pub ordering_ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolutionSummary {
    pub index: usize,
    pub file: String,
    pub norm: f64,
    pub min_full: f64,
    pub min_tail: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
    pub residuals: ResidualReport,
    pub converged: bool,
    pub status: Status,
    pub iterations: usize,
    pub clamp_events: usize,
    pub cone_member: bool,
    pub source: Vec<Source>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub route_distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_data: Option<(f64, f64)>,
}

impl SolutionSummary {
    pub fn new(index: usize, file: String, s: &FoundSolution, eta: f64) -> SolutionSummary {
        let u = s.curve();
        SolutionSummary {
            index,
            file,
            norm: u.norm(),
            min_full: u.min(),
            min_tail: u.min_from(eta),
            label: s.class.map(|c| c.label),
            residuals: s.result.residuals,
            converged: s.result.converged,
            status: s.result.status,
            iterations: s.result.iterations,
            clamp_events: s.result.clamp_events,
            cone_member: s.cone.member,
            source: s.sources.clone(),
            route_distance: s.route_distance,
            initial_data: s.initial_data,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepSummary {
    pub file: String,
    pub rows: usize,
    pub h2_failures: usize,
}
