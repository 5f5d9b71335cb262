use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use shearmhd::experiments::{run_experiment, ArtifactBundle, ExperimentKind, RunConfig};

/// Experiments on 2D non-resistive MHD near Couette flow.
#[derive(Parser)]
#[command(name = "shearmhd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Frequency-wise linear energy audit over a (k, eta) sweep.
    LinearSweep(RunArgs),
    /// Nonlinear run with diagnostics and the energy-identity residual.
    Simulate(RunArgs),
    /// Small-data stability up to c * eps^{-1/2}.
    Stability(RunArgs),
    /// Norm inflation against the linear evolution up to c * eps^{-2/3}.
    Inflation(RunArgs),
    /// Three-mode echo chains and their growth against eta^{1/3}.
    Echo(RunArgs),
    /// Tabulates the Fourier multipliers on a time grid.
    WeightsAudit(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML file overriding the defaults of the subcommand.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory; defaults to `output_dir` from the config, then `out/<kind>`.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed of the initial data, overriding the config.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
    /// Print the resolved configuration as TOML and exit.
    #[arg(long)]
    print_config: bool,
}

impl Command {
    fn split(self) -> (ExperimentKind, RunArgs) {
        match self {
            Command::LinearSweep(a) => (ExperimentKind::LinearSweep, a),
            Command::Simulate(a) => (ExperimentKind::Simulate, a),
            Command::Stability(a) => (ExperimentKind::Stability, a),
            Command::Inflation(a) => (ExperimentKind::Inflation, a),
            Command::Echo(a) => (ExperimentKind::Echo, a),
            Command::WeightsAudit(a) => (ExperimentKind::WeightsAudit, a),
        }
    }
}

fn load_config(kind: ExperimentKind, args: &RunArgs) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            RunConfig::from_toml_str(Some(kind), &text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => RunConfig::defaults(kind),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn report(bundle: &ArtifactBundle, dir: &Path) {
    let s = &bundle.summary;
    for a in &s.assertions {
        let bounds = match (a.lower, a.upper) {
            (Some(l), Some(u)) => format!("in [{l:e}, {u:e}]"),
            (Some(l), None) => format!(">= {l:e}"),
            (None, Some(u)) => format!("<= {u:e}"),
            (None, None) => "unbounded".into(),
        };
        let tag = if a.passed { "PASS" } else { "FAIL" };
        println!("{tag} {}: {:.6e} {bounds}", a.name, a.value);
    }
    println!(
        "{} {} in {:.2} s, artifacts in {}",
        s.kind,
        if s.passed { "passed" } else { "failed" },
        s.runtime_seconds,
        dir.display()
    );
}

fn run(cli: Cli) -> Result<bool> {
    let (kind, args) = cli.command.split();
    let cfg = load_config(kind, &args)?;
    if args.print_config {
        print!("{}", cfg.to_toml_string()?);
        return Ok(true);
    }
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let dir = args
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| Path::new("out").join(kind.name()));
    let bundle = run_experiment(&cfg)?;
    bundle.write_to(&dir).with_context(|| format!("writing artifacts to {}", dir.display()))?;
    report(&bundle, &dir);
    Ok(bundle.passed())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
