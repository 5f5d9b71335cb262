//! Run configuration, orchestration of the six experiments, fits and artifact bundles.

mod config;
mod fit;
mod flow;
mod initial;
mod output;
mod studies;

pub use config::{
    AuditOptions, Assertions, EchoOptions, ExperimentKind, GridSpec, InflationOptions, RunConfig, SimulateOptions, TimePolicy,
    TimeSpec,
};
pub use fit::{fit_power_law, linear_fit, FitResult, LinearFit, MIN_FIT_SAMPLES};
pub use initial::{dominance, initial_state, slave_g, Dominance, FieldChoice, InitialData, ModeSpec};
pub use output::{ArtifactBundle, AssertionOutcome, Summary, SUMMARY_SCHEMA_VERSION};

use std::time::Instant;

use crate::error::Result;
use output::Collector;

/// Validates `cfg`, runs its experiment and collects every artifact in memory.
///
/// CSV contents depend only on the configuration; `runtime_seconds` is the only
/// nondeterministic entry of the summary.
pub fn run_experiment(cfg: &RunConfig) -> Result<ArtifactBundle> {
    cfg.validate()?;
    let start = Instant::now();
    let mut col = Collector::new(&cfg.assertions.skip);
    match cfg.kind {
        ExperimentKind::LinearSweep => studies::run_linear_sweep(cfg, &mut col)?,
        ExperimentKind::Simulate => flow::run_simulate(cfg, &mut col)?,
        ExperimentKind::Stability => flow::run_stability(cfg, &mut col)?,
        ExperimentKind::Inflation => flow::run_inflation(cfg, &mut col)?,
        ExperimentKind::Echo => studies::run_echo(cfg, &mut col)?,
        ExperimentKind::WeightsAudit => studies::run_weights_audit(cfg, &mut col)?,
    }
    let passed = col.assertions.iter().all(|a| a.passed);
    let files = col.files.iter().map(|(n, _)| n.clone()).collect();
    Ok(ArtifactBundle {
        summary: Summary {
            schema_version: SUMMARY_SCHEMA_VERSION,
            kind: cfg.kind,
            seed: cfg.seed,
            config: cfg.clone(),
            metrics: col.metrics,
            assertions: col.assertions,
            passed,
            runtime_seconds: start.elapsed().as_secs_f64(),
            files,
        },
        files: col.files,
    })
}
