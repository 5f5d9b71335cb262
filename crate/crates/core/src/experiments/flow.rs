use num_complex::Complex64;
use serde::Serialize;
use std::collections::VecDeque;
use std::sync::Arc;

use super::config::RunConfig;
use super::fit::fit_power_law;
use super::initial::{dominance, initial_state, slave_g};
use super::output::{csv_table, Collector};
use crate::error::{Error, Result};
use crate::linear::{linear_field_solution, LinearParams};
use crate::nonlinear::{
    diagnostics, energy_identity_residual, field_norms, frozen_identity_residual, weighted_energy, DiagnosticsConfig,
    DiagnosticsRecord, FlowState, ResidualSeries, Scheme, Simulation, StepperConfig,
};
use crate::spectral::{write_snapshot, SpectralField};
use crate::weights::{lambda_at, WeightTable};

/// CFL rejections tolerated per run before giving up.
const MAX_CFL_RETRIES: u32 = 40;

fn stepper_config(cfg: &RunConfig, stride: f64, nonlinear: bool) -> StepperConfig {
    StepperConfig {
        dt: cfg.time.dt.min(stride),
        scheme: Scheme::default(),
        cfl_safety: cfg.time.cfl_safety,
        nu: cfg.nu,
        alpha: cfg.alpha,
        nonlinear,
    }
}

fn diag_config(cfg: &RunConfig) -> DiagnosticsConfig {
    DiagnosticsConfig {
        nu: cfg.nu,
        alpha: cfg.alpha,
        k0: cfg.k0,
    }
}

/// `0, h, 2h, …` up to `t_end`; `t_end` itself is appended when off the lattice and `close` is set.
pub(crate) fn sample_times(t_end: f64, h: f64, close: bool) -> Vec<f64> {
    let n = (t_end / h + 1e-9).floor() as usize;
    let mut v: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    if close && t_end - v[n] > 1e-9 * h {
        v.push(t_end);
    }
    v
}

/// Advances to `t`, shrinking the step after each CFL rejection.
fn advance(sim: &mut Simulation, t: f64, rejections: &mut u32) -> Result<()> {
    loop {
        match sim.advance_to(t) {
            Ok(()) => return Ok(()),
            Err(Error::Cfl { suggested_dt, .. }) if *rejections < MAX_CFL_RETRIES => {
                *rejections += 1;
                sim.set_dt(suggested_dt)?;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Initial state of a flow run.
fn start(cfg: &RunConfig, grid: Arc<crate::spectral::Grid>) -> Result<FlowState> {
    let mut s = initial_state(&cfg.initial, grid, cfg.epsilon, cfg.seed)?;
    if cfg.slaved_g {
        slave_g(&mut s, cfg.nu, cfg.alpha);
    }
    Ok(s)
}

fn state_size(s: &FlowState) -> f64 {
    (s.phi.norm_sq() + s.g.norm_sq() + s.v0x.norm_sq()).sqrt()
}

fn diagnostics_csv(records: &[DiagnosticsRecord]) -> Result<Vec<u8>> {
    csv_table(&DiagnosticsRecord::COLUMNS, records.iter().map(|r| r.values().to_vec()))
}

#[derive(Serialize)]
struct IdentityMetrics {
    h: f64,
    max_abs: f64,
    max_energy: f64,
    relative: f64,
    frozen_relative: f64,
}

impl IdentityMetrics {
    fn new(full: &ResidualSeries, frozen: &ResidualSeries) -> Self {
        Self {
            h: full.h,
            max_abs: full.max_abs,
            max_energy: full.max_energy,
            relative: full.relative_max(),
            frozen_relative: frozen.relative_max(),
        }
    }
}

/// Energy-identity audit: diagnostics at stride `h/2` (or `h`), centered residuals at both strides.
pub(crate) fn run_simulate(cfg: &RunConfig, col: &mut Collector) -> Result<()> {
    let t_end = cfg.t_end()?;
    let h = cfg.time.sample_dt;
    let refine = cfg.simulate.refine;
    let stride = if refine { 0.5 * h } else { h };
    let times = sample_times(t_end, stride, false);
    if times.len() < 5 {
        return Err(Error::Config(format!("t_end = {t_end} leaves fewer than 5 samples at stride {stride}")));
    }
    let grid = Arc::new(cfg.grid.build()?);
    let state0 = start(cfg, grid.clone())?;
    let mut sim = Simulation::new(state0, stepper_config(cfg, stride, cfg.effective_nonlinear()))?;
    let dcfg = diag_config(cfg);
    let mut table = WeightTable::new(cfg.weights.clone(), grid, 0.0)?;
    let n = times.len();
    let mut records = Vec::with_capacity(n);
    // frozen[s - 1][c] holds E(t_{c∓s}) measured with the weights of t_c.
    let mut frozen = [vec![(f64::NAN, f64::NAN); n], vec![(f64::NAN, f64::NAN); n]];
    let mut ring: VecDeque<(FlowState, WeightTable)> = VecDeque::with_capacity(5);
    let mut rejections = 0;
    let mut next_snapshot = 0.0;
    for (i, &t) in times.iter().enumerate() {
        if i > 0 {
            advance(&mut sim, t, &mut rejections)?;
            table = table.advanced(t)?;
        }
        let state = sim.flow_state();
        records.push(diagnostics(&state, &table, &dcfg)?);
        if let Some(every) = cfg.simulate.snapshot_every {
            if t >= next_snapshot - 1e-9 * stride {
                for (f, name) in [(&state.phi, "phi"), (&state.g, "g"), (&state.v0x, "v0x")] {
                    let mut buf = Vec::new();
                    write_snapshot(&mut buf, f, t)?;
                    col.file(&format!("snapshots/{name}_{i:06}.bin"), buf);
                }
                next_snapshot += every;
            }
        }
        if ring.len() == 5 {
            ring.pop_front();
        }
        ring.push_back((state, table.clone()));
        for s in 1..=2usize {
            if i >= 2 * s {
                let len = ring.len();
                let weights = &ring[len - 1 - s].1;
                frozen[s - 1][i - s] = (
                    weighted_energy(&ring[len - 1 - 2 * s].0, weights)?,
                    weighted_energy(&ring[len - 1].0, weights)?,
                );
            }
        }
    }

    let unzip = |v: &[(f64, f64)]| -> (Vec<f64>, Vec<f64>) { v.iter().copied().unzip() };
    let (em, ep) = unzip(&frozen[0]);
    let fine = energy_identity_residual(&records)?;
    let fine_frozen = frozen_identity_residual(&records, &em, &ep)?;
    let mut series = vec![(fine, fine_frozen)];
    if refine {
        let coarse: Vec<DiagnosticsRecord> = records.iter().step_by(2).copied().collect();
        let every_other: Vec<(f64, f64)> = frozen[1].iter().step_by(2).copied().collect();
        let (em, ep) = unzip(&every_other);
        if coarse.len() >= 3 {
            let full = energy_identity_residual(&coarse)?;
            let frozen = frozen_identity_residual(&coarse, &em, &ep)?;
            series.insert(0, (full, frozen));
        }
    }

    let mut rows = Vec::new();
    for (full, frozen) in &series {
        for j in 0..full.t.len() {
            rows.push(vec![full.h, full.t[j], full.residual[j], frozen.residual[j]]);
        }
    }
    col.file("diagnostics.csv", diagnostics_csv(&records)?);
    col.file("identity.csv", csv_table(&["h", "t", "residual", "residual_frozen"], rows)?);

    let identity: Vec<IdentityMetrics> = series.iter().map(|(a, b)| IdentityMetrics::new(a, b)).collect();
    let at_h = identity[0].relative;
    col.metric("t_end", t_end)?;
    col.metric("samples", n)?;
    col.metric("steps", sim.steps())?;
    col.metric("cfl_rejections", rejections)?;
    col.metric("final_dt", sim.config().dt)?;
    col.metric("records_finite", records.iter().all(DiagnosticsRecord::is_finite))?;
    col.metric("max_energy", records.iter().map(|r| r.e).fold(0.0, f64::max))?;
    col.metric("identity", &identity)?;
    col.assert("identity_relative", at_h, None, cfg.assertions.identity_relative);
    if identity.len() == 2 {
        let gain = identity[0].relative / identity[1].relative;
        col.metric("refinement_gain", gain)?;
        col.assert("refinement_gain", gain, cfg.assertions.refinement_gain, None);
    }
    Ok(())
}

/// Small-data stability: `E(t)/E(0)` on `[0, t_end]`.
pub(crate) fn run_stability(cfg: &RunConfig, col: &mut Collector) -> Result<()> {
    let t_end = cfg.t_end()?;
    let h = cfg.time.sample_dt;
    let times = sample_times(t_end, h, true);
    let grid = Arc::new(cfg.grid.build()?);
    let state0 = start(cfg, grid.clone())?;
    let size0 = state_size(&state0);
    let mut sim = Simulation::new(state0, stepper_config(cfg, h, cfg.effective_nonlinear()))?;
    let dcfg = diag_config(cfg);
    let mut table = WeightTable::new(cfg.weights.clone(), grid, 0.0)?;
    let mut records = Vec::with_capacity(times.len());
    let mut max_size_ratio: f64 = 0.0;
    let mut rejections = 0;
    for (i, &t) in times.iter().enumerate() {
        if i > 0 {
            advance(&mut sim, t, &mut rejections)?;
            table = table.advanced(t)?;
        }
        let state = sim.flow_state();
        max_size_ratio = max_size_ratio.max(state_size(&state) / size0);
        records.push(diagnostics(&state, &table, &dcfg)?);
    }
    let e0 = records[0].e;
    let ratio = records.iter().map(|r| r.e / e0).fold(0.0, f64::max);
    let ratio = if records.iter().all(DiagnosticsRecord::is_finite) { ratio } else { f64::NAN };
    col.file("diagnostics.csv", diagnostics_csv(&records)?);
    col.metric("t_end", t_end)?;
    col.metric("samples", times.len())?;
    col.metric("steps", sim.steps())?;
    col.metric("cfl_rejections", rejections)?;
    col.metric("energy0", e0)?;
    col.metric("max_energy_ratio", ratio)?;
    col.metric("max_size_ratio", max_size_ratio)?;
    col.assert("max_energy_ratio", ratio, None, cfg.assertions.max_energy_ratio);
    Ok(())
}

/// End of the inflation fit window; a linear run without an absolute policy uses `t_end`.
fn inflation_fit_end(cfg: &RunConfig, t_end: f64) -> Result<f64> {
    if cfg.epsilon == 0.0 {
        return Ok(match cfg.inflation.fit_end {
            super::config::TimePolicy::Absolute(t) => t,
            _ => t_end,
        });
    }
    cfg.inflation.fit_end.resolve(cfg.epsilon)
}

fn fit_or_nan(col: &mut Collector, name: &str, series: &[(f64, f64)], window: (f64, f64)) -> Result<f64> {
    match fit_power_law(series, window) {
        Ok(fit) => {
            col.metric(name, fit)?;
            Ok(fit.exponent)
        }
        Err(e) => {
            col.metric(name, e.to_string())?;
            Ok(f64::NAN)
        }
    }
}

fn difference(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    let mut d = a.clone();
    d.axpy(Complex64::new(-1.0, 0.0), b)?;
    Ok(d)
}

#[derive(Serialize)]
struct ScanEntry {
    k0: i64,
    max_ratio: f64,
}

/// Norm inflation against the linear evolution of the same data.
pub(crate) fn run_inflation(cfg: &RunConfig, col: &mut Collector) -> Result<()> {
    let t_end = cfg.t_end()?;
    let fit_end = inflation_fit_end(cfg, t_end)?;
    let h = cfg.time.sample_dt;
    let times = sample_times(t_end, h, true);
    let grid = Arc::new(cfg.grid.build()?);
    let state0 = start(cfg, grid)?;
    let dom = dominance(&state0, cfg.k0);
    col.metric("dominance", dom)?;
    if !dom.holds(cfg.inflation.dominance_c) {
        return Err(Error::Config(format!(
            "initial data violate the dominance hypothesis at k0 = {}: {dom:?}",
            cfg.k0
        )));
    }
    let mut sim = Simulation::new(state0.clone(), stepper_config(cfg, h, cfg.effective_nonlinear()))?;
    let mut base = Simulation::new(state0.clone(), stepper_config(cfg, h, false))?;
    let s_exp = cfg.weights.s;
    let mut scan = vec![0.0f64; cfg.inflation.k0_scan.len()];
    let mut rows = Vec::with_capacity(times.len());
    let (mut j_series, mut tb_series, mut disc_series) = (Vec::new(), Vec::new(), Vec::new());
    let (mut max_ratio, mut sandwich) = (0.0f64, 1.0f64);
    let mut rejections = 0;
    for (i, &t) in times.iter().enumerate() {
        if i > 0 {
            base.set_dt(sim.config().dt)?;
            advance(&mut sim, t, &mut rejections)?;
            advance(&mut base, t, &mut rejections)?;
        }
        let (s, b) = (sim.flow_state(), base.flow_state());
        let lambda = lambda_at(t, &cfg.weights);
        let fm = field_norms(&s.phi, t, lambda, s_exp, cfg.k0);
        let fb = field_norms(&b.phi, t, lambda, s_exp, cfg.k0);
        let diff = difference(&s.phi, &b.phi)?;
        let fd = field_norms(&diff, t, lambda, s_exp, cfg.k0);
        let ratio = if fb.x_seminorm > 0.0 { fd.x_seminorm / fb.x_seminorm } else { f64::NAN };
        max_ratio = max_ratio.max(ratio);
        if fb.x_seminorm > 0.0 && fm.x_seminorm > 0.0 {
            sandwich = sandwich.max(fm.x_seminorm / fb.x_seminorm).max(fb.x_seminorm / fm.x_seminorm);
        }
        for (slot, &k0) in scan.iter_mut().zip(&cfg.inflation.k0_scan) {
            let lin = field_norms(&b.phi, t, lambda, s_exp, k0).x_seminorm;
            let dis = field_norms(&diff, t, lambda, s_exp, k0).x_seminorm;
            if lin > 0.0 {
                *slot = slot.max(dis / lin);
            }
        }
        let tb = (1.0 + t * t).sqrt() * fm.b_norm;
        j_series.push((t, fm.j_norm));
        tb_series.push((t, tb));
        disc_series.push((t, fd.x_seminorm));
        rows.push(vec![
            t,
            fm.j_norm,
            fm.b_norm,
            tb,
            fm.phi_norm,
            fm.gevrey_norm,
            fm.x_seminorm,
            fb.x_seminorm,
            fd.x_seminorm,
            ratio,
        ]);
    }
    col.file(
        "inflation.csv",
        csv_table(
            &[
                "t",
                "j_norm",
                "b_norm",
                "t_b_norm",
                "phi_norm",
                "gevrey_norm",
                "x_seminorm",
                "x_lin",
                "x_discrepancy",
                "x_ratio",
            ],
            rows,
        )?,
    );

    let window = (cfg.inflation.fit_start, fit_end);
    let j_exp = fit_or_nan(col, "j_fit", &j_series, window)?;
    let tb_exp = fit_or_nan(col, "t_b_fit", &tb_series, window)?;
    if cfg.effective_nonlinear() {
        fit_or_nan(col, "discrepancy_fit", &disc_series, (cfg.inflation.fit_start, t_end))?;
    }
    let lp = LinearParams {
        nu: cfg.nu,
        alpha: cfg.alpha,
    };
    let exact = linear_field_solution(&state0, t_end, 1e-10, &lp)?;
    let b_end = base.flow_state();
    let cross = difference(&exact.phi, &b_end.phi)?.norm() / b_end.phi.norm();

    let scan: Vec<ScanEntry> = cfg
        .inflation
        .k0_scan
        .iter()
        .zip(scan)
        .map(|(&k0, max_ratio)| ScanEntry { k0, max_ratio })
        .collect();
    col.metric("t_end", t_end)?;
    col.metric("fit_window", window)?;
    col.metric("samples", times.len())?;
    col.metric("steps", sim.steps())?;
    col.metric("cfl_rejections", rejections)?;
    col.metric("implied_delta", cfg.epsilon * t_end.powf(1.5))?;
    col.metric("max_baseline_ratio", max_ratio)?;
    col.metric("sandwich_constant", sandwich)?;
    col.metric("k0_scan", scan)?;
    col.metric("baseline_vs_mode_solution", cross)?;
    let range = cfg.assertions.exponent_range;
    col.assert("j_exponent", j_exp, range.map(|r| r[0]), range.map(|r| r[1]));
    col.assert("t_b_exponent", tb_exp, range.map(|r| r[0]), range.map(|r| r[1]));
    col.assert("baseline_ratio", max_ratio, None, cfg.assertions.baseline_ratio);
    Ok(())
}
