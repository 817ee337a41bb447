use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use tpbvp_cli::config::{Mode, RunConfig};
use tpbvp_cli::{run, Failure, RunOptions};
use tpbvp_core::certifier::ThresholdTriple;
use tpbvp_core::Number;

#[derive(Parser)]
#[command(name = "tpbvp", version, about = "Three-point integral boundary-value problems: constants, certificates, solutions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides `output_dir` from the configuration.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Omit wall times so that reports are byte-for-byte reproducible.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct Triple {
    /// Threshold a (integer, p/q or decimal).
    #[arg(long)]
    a: Option<Number>,
    #[arg(long)]
    b: Option<Number>,
    #[arg(long)]
    c: Option<Number>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the hypotheses and compute Lambda, gamma, m, delta.
    Constants {
        #[command(flatten)]
        common: Common,
    },
    /// Certify a threshold triple (searched for when none is given).
    Certify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        triple: Triple,
    },
    /// Certify, then search for solutions and write one CSV per solution.
    Solve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        triple: Triple,
        /// Grid nodes (odd, at least 65).
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Constants and verdicts over a parameter grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// `name:lo:hi:steps` with name in {alpha, beta, eta}; repeatable.
        #[arg(long = "axis", required = true)]
        axes: Vec<String>,
    },
    /// Run the mode named in the configuration.
    Run {
        #[command(flatten)]
        common: Common,
    },
}

/// Merges `--a/--b/--c` into the configured triple; true if any was given.
fn apply_triple(cfg: &mut RunConfig, t: Triple) -> Result<bool, Failure> {
    if t.a.is_none() && t.b.is_none() && t.c.is_none() {
        return Ok(false);
    }
    let current = cfg.thresholds.clone();
    let pick = |v: Option<Number>, name: &str, from: Option<&Number>| {
        v.or_else(|| from.cloned())
            .ok_or_else(|| Failure::Config(format!("--{name} missing and not in the configuration")))
    };
    let a = pick(t.a, "a", current.as_ref().map(|x| &x.a))?;
    let b = pick(t.b, "b", current.as_ref().map(|x| &x.b))?;
    let c = pick(t.c, "c", current.as_ref().map(|x| &x.c))?;
    cfg.thresholds = Some(ThresholdTriple::new(a, b, c).map_err(|e| Failure::Config(e.to_string()))?);
    Ok(true)
}

fn prepare(cli: Cli) -> Result<(RunConfig, RunOptions), Failure> {
    let (common, mode) = match &cli.command {
        Command::Constants { common } => (common, Some(Mode::Constants)),
        Command::Certify { common, .. } => (common, Some(Mode::Certify)),
        Command::Solve { common, .. } => (common, Some(Mode::Solve)),
        Command::Sweep { common, .. } => (common, Some(Mode::Sweep)),
        Command::Run { common } => (common, None),
    };
    let mut cfg = RunConfig::load(&common.config)?;
    if let Some(m) = mode {
        cfg.mode = m;
    }
    if let Some(dir) = &common.output_dir {
        cfg.output_dir = dir.clone();
    }
    let mut opts = RunOptions {
        no_timing: common.no_timing,
        thresholds_from_cli: false,
    };
    match cli.command {
        Command::Certify { triple, .. } => opts.thresholds_from_cli = apply_triple(&mut cfg, triple)?,
        Command::Solve { triple, grid, .. } => {
            opts.thresholds_from_cli = apply_triple(&mut cfg, triple)?;
            if let Some(n) = grid {
                cfg.solver.grid_n = n;
            }
        }
        Command::Sweep { axes, .. } => cfg.axes = axes,
        _ => {}
    }
    cfg.validate()?;
    Ok((cfg, opts))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = prepare(cli).and_then(|(cfg, opts)| run(&cfg, &opts).map(|o| (cfg, o)));
    match result {
        Ok((cfg, outcome)) => {
            let path = cfg.output_dir.join("report.json");
            for m in &outcome.report.messages {
                eprintln!("note: {m}");
            }
            if let Err(e) = summarize(&outcome.report, &path) {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn summarize(report: &tpbvp_cli::report::RunReport, path: &std::path::Path) -> anyhow::Result<()> {
    let json = serde_json::to_value(report).context("serializing the report")?;
    if let Some(k) = json.get("constants") {
        println!("constants: {k}");
    }
    if let Some(c) = report.certificate.as_ref() {
        println!("certificate verdict: {}", c.verdict);
    }
    if let Some(s) = report.solutions.as_ref() {
        println!("solutions: {}", s.len());
    }
    println!("report: {}", path.display());
    Ok(())
}
