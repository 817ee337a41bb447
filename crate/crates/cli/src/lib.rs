//! Batch pipeline: validate, compute constants, certify, solve, sweep.

pub mod config;
pub mod report;
pub mod sweep;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use thiserror::Error;
use tpbvp_core::certifier::{certify, check_ordering, search_thresholds, ThresholdTriple};
use tpbvp_core::constants::ConstantsReport;
use tpbvp_core::nonlinear::find_solutions;
use tpbvp_core::{validate_hypotheses, Constants, Problem};

use config::{Mode, RunConfig};
use report::{BreakpointReport, RunReport, SolutionSummary, SweepSummary, ThresholdSource, ThresholdsUsed};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_HYPOTHESIS: i32 = 3;
pub const EXIT_CERTIFICATION: i32 = 4;
pub const EXIT_NUMERICAL: i32 = 5;

#[derive(Debug, Error)]
pub enum Failure {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Failure {
    pub fn numerical(e: tpbvp_core::Error) -> Failure {
        Failure::Numerical(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Numerical(_) => EXIT_NUMERICAL,
            Failure::Io(_) => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Leave wall times out of the report so that it is reproducible.
    pub no_timing: bool,
    /// The configured triple was overridden on the command line.
    pub thresholds_from_cli: bool,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub report: RunReport,
    pub exit_code: i32,
}

struct Stopwatch {
    enabled: bool,
    times: BTreeMap<String, f64>,
}

impl Stopwatch {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        if self.enabled {
            self.times.insert(stage.to_string(), start.elapsed().as_secs_f64());
        }
        out
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    fs::write(dir.join(name), contents).map_err(|e| Failure::Io(format!("{}: {e}", dir.join(name).display())))
}

/// Runs the stages implied by `cfg.mode` and writes `report.json` (plus
/// curve or sweep CSVs) into `cfg.output_dir`.
pub fn run(cfg: &RunConfig, opts: &RunOptions) -> Result<RunOutcome, Failure> {
    cfg.validate()?;
    let problem = cfg.problem()?;
    let dir = cfg.output_dir.clone();
    fs::create_dir_all(&dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;

    let mut watch = Stopwatch {
        enabled: !opts.no_timing,
        times: BTreeMap::new(),
    };
    let mut report = RunReport::new(cfg.mode, cfg.clone());
    let exit_code = if cfg.mode == Mode::Sweep {
        run_sweep(cfg, &problem, &dir, &mut report, &mut watch)?
    } else {
        run_pipeline(cfg, opts, &problem, &dir, &mut report, &mut watch)?
    };
    report.exit_code = exit_code;
    if watch.enabled {
        report.timing = Some(watch.times);
    }
    write_file(&dir, "report.json", &report.to_json())?;
    Ok(RunOutcome { report, exit_code })
}

fn run_pipeline(
    cfg: &RunConfig,
    opts: &RunOptions,
    problem: &Problem,
    dir: &Path,
    report: &mut RunReport,
    watch: &mut Stopwatch,
) -> Result<i32, Failure> {
    let hyp = watch.time("hypotheses", || validate_hypotheses(problem, cfg.u_max()));
    report.breakpoints = problem.f().breakpoint_checks().iter().map(BreakpointReport::from).collect();
    let passed = hyp.passed();
    report.messages.extend(hyp.messages.iter().cloned());
    report.hypothesis = Some(hyp);
    if !passed {
        return Ok(EXIT_HYPOTHESIS);
    }
    problem
        .f()
        .check_on(cfg.sample_domain())
        .map_err(|e| Failure::Config(format!("problem.f: {e}")))?;

    let k = watch.time("constants", || Constants::compute(problem)).map_err(Failure::numerical)?;
    report.constants = Some(ConstantsReport::from(&k));
    if cfg.mode == Mode::Constants {
        return Ok(EXIT_OK);
    }

    let (tt, source) = match &cfg.thresholds {
        Some(tt) if opts.thresholds_from_cli => (Some(tt.clone()), ThresholdSource::CommandLine),
        Some(tt) => (Some(tt.clone()), ThresholdSource::Config),
        None => {
            let found = watch
                .time("search", || search_thresholds(problem, &k, &cfg.search, &cfg.sampling))
                .map_err(Failure::numerical)?;
            if found.is_none() {
                report.messages.push("threshold search found no certifiable triple".into());
            }
            (found, ThresholdSource::Search)
        }
    };
    let mut exit = EXIT_OK;
    if let Some(tt) = &tt {
        report.thresholds = Some(thresholds_used(tt, source, &k));
        let cert = watch
            .time("certify", || certify(problem, tt, &k, &cfg.sampling))
            .map_err(Failure::numerical)?;
        if !cert.verdict && cfg.mode == Mode::Certify {
            exit = EXIT_CERTIFICATION;
        }
        report.certificate = Some(cert);
    } else if cfg.mode == Mode::Certify {
        exit = EXIT_CERTIFICATION;
    }
    if cfg.mode == Mode::Certify {
        return Ok(exit);
    }

    let set = watch
        .time("solve", || find_solutions(problem, tt.as_ref(), &cfg.solve_config()))
        .map_err(Failure::numerical)?;
    let mut summaries = Vec::new();
    for (i, s) in set.solutions.iter().enumerate() {
        let name = format!("solution_{}.csv", i + 1);
        write_file(dir, &name, &s.curve().to_csv_string())?;
        summaries.push(SolutionSummary::new(i + 1, name, s, problem.eta()));
    }
    report.solutions = Some(summaries);
    report.search_summary = Some(set.summary);
    Ok(exit)
}

fn thresholds_used(tt: &ThresholdTriple, source: ThresholdSource, k: &Constants) -> ThresholdsUsed {
    ThresholdsUsed {
        source,
        a: tt.a.clone(),
        b: tt.b.clone(),
        c: tt.c.clone(),
        d: tt.d(&k.gamma),
        ordering_ok: check_ordering(tt, &k.gamma),
    }
}

fn run_sweep(
    cfg: &RunConfig,
    problem: &Problem,
    dir: &Path,
    report: &mut RunReport,
    watch: &mut Stopwatch,
) -> Result<i32, Failure> {
    if cfg.axes.is_empty() {
        return Err(Failure::Config("sweep needs at least one axis".into()));
    }
    let axes = cfg
        .axes
        .iter()
        .map(|s| s.parse::<sweep::Axis>())
        .collect::<Result<Vec<_>, _>>()?;
    let rows = watch.time("sweep", || {
        sweep::sweep(problem, &axes, cfg.thresholds.as_ref(), &cfg.sampling)
    })?;
    write_file(dir, "sweep.csv", &sweep::to_csv(&rows))?;
    report.sweep = Some(SweepSummary {
        file: "sweep.csv".into(),
        rows: rows.len(),
        h2_failures: rows.iter().filter(|r| r.verdict == "H2-fail").count(),
    });
    Ok(EXIT_OK)
}
