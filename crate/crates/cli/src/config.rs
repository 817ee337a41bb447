//! Run configuration documents.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tpbvp_core::catalog::{FunctionSpec, SampleDomain};
use tpbvp_core::certifier::{SamplingConfig, SearchConfig, ThresholdTriple};
use tpbvp_core::nonlinear::SolveConfig;
use tpbvp_core::problem::DEFAULT_U_MAX;
use tpbvp_core::tolerances::{Tolerances, DEFAULT_GRID_N};
use tpbvp_core::{Number, Problem};

use crate::Failure;

/// Smallest grid accepted from configuration.
pub const MIN_GRID_N: usize = 65;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Constants,
    Certify,
    #[default]
    Solve,
    Sweep,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDoc {
    #[serde(rename = "T")]
    pub t_end: Number,
    pub eta: Number,
    pub alpha: Number,
    pub beta: Number,
    /// Function document; see the catalog for the accepted kinds.
    pub f: serde_json::Value,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverDoc {
    pub grid_n: usize,
    pub tolerances: Tolerances,
    pub max_iter: usize,
    pub starts_per_axis: usize,
}

impl Default for SolverDoc {
    fn default() -> Self {
        let d = SolveConfig::default();
        SolverDoc {
            grid_n: DEFAULT_GRID_N,
            tolerances: d.tolerances,
            max_iter: d.max_iter,
            starts_per_axis: d.starts_per_axis,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemDoc,
    #[serde(default)]
    pub thresholds: Option<ThresholdTriple>,
    #[serde(default)]
    pub solver: SolverDoc,
    #[serde(default)]
    pub sampling: SamplingConfig,
    #[serde(default)]
    pub search: SearchConfig,
    #[serde(default)]
    pub mode: Mode,
    /// Sweep axes `name:lo:hi:steps`, used in sweep mode.
    #[serde(default)]
    pub axes: Vec<String>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig, Failure> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Failure::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig, Failure> {
        let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        RunConfig::from_json(&text).map_err(|e| match e {
            Failure::Config(msg) => Failure::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), Failure> {
        let n = self.solver.grid_n;
        if n < MIN_GRID_N || n.is_multiple_of(2) {
            return Err(Failure::Config(format!("grid_n = {n} must be odd and at least {MIN_GRID_N}")));
        }
        self.solver.tolerances.validate().map_err(Failure::Config)?;
        if let Some(t) = &self.thresholds {
            ThresholdTriple::new(t.a.clone(), t.b.clone(), t.c.clone()).map_err(|e| Failure::Config(e.to_string()))?;
        }
        if self.solver.max_iter == 0 || self.solver.starts_per_axis == 0 {
            return Err(Failure::Config("max_iter and starts_per_axis must be positive".into()));
        }
        Ok(())
    }

    /// Upper end of the `u` range used to sample `f`.
    pub fn u_max(&self) -> f64 {
        self.thresholds.as_ref().map_or(DEFAULT_U_MAX, |t| t.values().2.max(DEFAULT_U_MAX))
    }

    /// Builds the problem. Structural errors in the function document are
    /// configuration errors; sign checks are left to the hypothesis stage.
    pub fn problem(&self) -> Result<Problem, Failure> {
        let f: FunctionSpec =
            serde_json::from_value(self.problem.f.clone()).map_err(|e| Failure::Config(format!("problem.f: {e}")))?;
        let d = &self.problem;
        Problem::new(d.t_end.clone(), d.eta.clone(), d.alpha.clone(), d.beta.clone(), f)
            .map_err(|e| Failure::Config(e.to_string()))
    }

    pub fn sample_domain(&self) -> SampleDomain {
        SampleDomain {
            t_end: self.problem.t_end.value(),
            u_max: self.u_max(),
        }
    }

    pub fn solve_config(&self) -> SolveConfig {
        SolveConfig {
            grid_n: self.solver.grid_n,
            tolerances: self.solver.tolerances,
            max_iter: self.solver.max_iter,
            starts_per_axis: self.solver.starts_per_axis,
            ..SolveConfig::default()
        }
    }
}
