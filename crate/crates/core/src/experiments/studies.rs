use rayon::prelude::*;
use serde::Serialize;

use super::config::RunConfig;
use super::fit::linear_fit;
use super::output::{csv_rows, Collector};
use crate::echo::{chain_run, ChainResult};
use crate::error::Result;
use crate::linear::{linear_sweep, LinearParams};
use crate::weights::{dq_ratio, lambda_at, log_a_parts, log_j, log_m_between, log_ml, log_q, q_breakpoints};

/// Frequency-wise linear energy audit with `A = m_L^{-1}`.
pub(crate) fn run_linear_sweep(cfg: &RunConfig, col: &mut Collector) -> Result<()> {
    let lp = LinearParams {
        nu: cfg.nu,
        alpha: cfg.alpha,
    };
    let (rows, summary) = linear_sweep(&cfg.sweep, &lp, &cfg.weights)?;
    col.file("linear_sweep.csv", csv_rows(&rows)?);
    col.metric("sweep", &summary)?;
    col.assert("max_energy_increase", summary.max_increase, None, cfg.assertions.max_energy_increase);
    Ok(())
}

#[derive(Serialize)]
struct EchoRow {
    eta: f64,
    k: u32,
    epsilon: f64,
    gain_down: f64,
    predicted: f64,
    ratio: f64,
    gain_next: f64,
    heuristic: f64,
}

#[derive(Serialize)]
struct ChainMetrics {
    eta: f64,
    links: usize,
    log_growth: f64,
    predicted_log_growth: f64,
}

/// Echo chains for every configured `η` and the fit of log-growth against `η^{1/3}`.
pub(crate) fn run_echo(cfg: &RunConfig, col: &mut Collector) -> Result<()> {
    let chains: Vec<ChainResult> = cfg
        .echo
        .etas
        .par_iter()
        .map(|&eta| chain_run(&cfg.echo.chain_config(eta)))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut worst: f64 = 1.0;
    for c in &chains {
        for l in &c.links {
            let ratio = l.gain_down / l.predicted;
            worst = worst.max(ratio).max(1.0 / ratio);
            rows.push(EchoRow {
                eta: c.eta,
                k: l.k,
                epsilon: l.epsilon,
                gain_down: l.gain_down,
                predicted: l.predicted,
                ratio,
                gain_next: l.gain_next,
                heuristic: l.heuristic,
            });
        }
    }
    col.file("echo.csv", csv_rows(&rows)?);
    let x: Vec<f64> = chains.iter().map(|c| c.eta.cbrt()).collect();
    let y: Vec<f64> = chains.iter().map(|c| c.log_growth).collect();
    let yp: Vec<f64> = chains.iter().map(|c| c.predicted_log_growth).collect();
    let fit = linear_fit(&x, &y)?;
    let predicted = linear_fit(&x, &yp)?;
    let summary: Vec<ChainMetrics> = chains
        .iter()
        .map(|c| ChainMetrics {
            eta: c.eta,
            links: c.links.len(),
            log_growth: c.log_growth,
            predicted_log_growth: c.predicted_log_growth,
        })
        .collect();
    col.metric("chains", summary)?;
    col.metric("growth_fit", fit)?;
    col.metric("predicted_growth_fit", predicted)?;
    col.metric("worst_gain_factor", worst)?;
    col.assert("gain_factor", worst, None, cfg.assertions.gain_factor);
    let slope = cfg.assertions.slope_range;
    col.assert("slope", fit.slope, slope.map(|r| r[0]), slope.map(|r| r[1]));
    col.assert("r_squared", fit.r_squared, cfg.assertions.min_r_squared, None);
    Ok(())
}

#[derive(Serialize)]
struct AuditRow {
    t: f64,
    k: i64,
    eta: f64,
    #[serde(rename = "log_mL")]
    log_ml: f64,
    log_m: f64,
    log_q: f64,
    dq_ratio: f64,
    #[serde(rename = "log_J")]
    log_j: f64,
    #[serde(rename = "log_A")]
    log_a: f64,
}

#[derive(Serialize)]
struct PeakMetrics {
    eta: f64,
    k: i64,
    t_peak: f64,
    resonant_time: f64,
    peak: f64,
}

/// Tabulates the multipliers on a time grid for every `(η, k)` of the audit.
pub(crate) fn run_weights_audit(cfg: &RunConfig, col: &mut Collector) -> Result<()> {
    let a = &cfg.audit;
    let p = &cfg.weights;
    let times: Vec<f64> = (0..a.t_count)
        .map(|i| a.t_min + (a.t_max - a.t_min) * i as f64 / (a.t_count - 1) as f64)
        .collect();
    let lambdas: Vec<f64> = times.iter().map(|&t| lambda_at(t, p)).collect();
    let pairs: Vec<(f64, i64)> = a.etas.iter().flat_map(|&eta| (a.k_min..=a.k_max).map(move |k| (eta, k))).collect();
    let tables: Vec<(Vec<AuditRow>, PeakMetrics)> = pairs
        .par_iter()
        .map(|&(eta, k)| {
            let mut lm = log_m_between(0.0, times[0], k, eta, p);
            let mut rows = Vec::with_capacity(times.len());
            let mut peak = PeakMetrics {
                eta,
                k,
                t_peak: f64::NAN,
                resonant_time: if k != 0 { eta / k as f64 } else { f64::NAN },
                peak: f64::NEG_INFINITY,
            };
            for (i, &t) in times.iter().enumerate() {
                if i > 0 {
                    lm += log_m_between(times[i - 1], t, k, eta, p);
                }
                let lq = log_q(t, k, eta, p);
                let dq = dq_ratio(t, k, eta, p);
                if dq > peak.peak {
                    peak.peak = dq;
                    peak.t_peak = t;
                }
                rows.push(AuditRow {
                    t,
                    k,
                    eta,
                    log_ml: log_ml(t, k, eta, p),
                    log_m: lm,
                    log_q: lq,
                    dq_ratio: dq,
                    log_j: log_j(t, k, eta, p),
                    log_a: log_a_parts(k, eta, lambdas[i], lm, lq, p).0,
                });
            }
            (rows, peak)
        })
        .collect();
    let mut rows = Vec::new();
    let mut peaks = Vec::new();
    for (r, pk) in tables {
        rows.extend(r);
        peaks.push(pk);
    }
    col.file("weights_audit.csv", csv_rows(&rows)?);

    let mut q_jump: f64 = 0.0;
    for &eta in &a.etas {
        for bp in q_breakpoints(eta) {
            let d = 1e-11 * bp.abs().max(1.0);
            for k in a.k_min..=a.k_max {
                // One-sided limits by linear extrapolation, so the slope does not count as a jump.
                let q = |t: f64| log_q(t, k, eta, p);
                let right = 2.0 * q(bp + d) - q(bp + 2.0 * d);
                let left = 2.0 * q(bp - d) - q(bp - 2.0 * d);
                q_jump = q_jump.max((right - left).abs());
            }
        }
    }
    col.metric("peaks", peaks)?;
    col.metric("q_jump", q_jump)?;
    col.assert("q_jump", q_jump, None, cfg.assertions.q_jump);
    Ok(())
}
