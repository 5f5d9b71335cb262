use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::mode_energy_report;
use super::rhs::{LinearParams, ModeState};
use super::trajectory::{integrate_mode, EnergyWeight};
use crate::error::{Error, Result};
use crate::weights::WeightParams;

/// Parameter sweep of the linear energy audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub k_min: i64,
    pub k_max: i64,
    pub eta_min: f64,
    pub eta_max: f64,
    /// Number of equally spaced `η` values in `[eta_min, eta_max]`.
    pub eta_count: usize,
    pub t_end: f64,
    pub rtol: f64,
    /// Initial `G` as `[re, im]`.
    pub g0: [f64; 2],
    /// Initial `φ` as `[re, im]`.
    pub phi0: [f64; 2],
    /// Spacing of the rows written to the sweep table.
    pub output_dt: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            k_min: 1,
            k_max: 8,
            eta_min: -32.0,
            eta_max: 32.0,
            eta_count: 129,
            t_end: 60.0,
            rtol: 1e-8,
            g0: [0.0, 0.0],
            phi0: [1.0, 0.0],
            output_dt: 1.0,
        }
    }
}

impl SweepConfig {
    pub fn etas(&self) -> Vec<f64> {
        if self.eta_count == 1 {
            return vec![self.eta_min];
        }
        let h = (self.eta_max - self.eta_min) / (self.eta_count - 1) as f64;
        (0..self.eta_count).map(|i| self.eta_min + i as f64 * h).collect()
    }

    fn validate(&self) -> Result<()> {
        if self.k_min > self.k_max || self.eta_count == 0 || !(self.t_end > 0.0) || !(self.output_dt > 0.0) {
            return Err(Error::Config("empty or malformed linear sweep".into()));
        }
        if self.k_min <= 0 && self.k_max >= 0 {
            return Err(Error::Config("the sweep range of k must exclude 0".into()));
        }
        Ok(())
    }
}

/// One row of the sweep table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub k: i64,
    pub eta: f64,
    pub t: f64,
    pub abs_g: f64,
    pub abs_phi: f64,
    pub e_weighted: f64,
    pub residual: f64,
}

/// Worst-case figures over all swept modes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub modes: usize,
    pub steps: u64,
    /// `max (E_{i+1} − E_i)/E(0)`.
    pub max_increase: f64,
    /// `max (E(t) + ½∫D − E(0))/E(0)`.
    pub max_budget_violation: f64,
    /// `max (dE/dt + ½D)/E(0)` at samples.
    pub max_residual: f64,
    /// Largest positive value of the frequency-wise inequality with the `m_L` growth term.
    pub max_literal_residual: f64,
    pub max_cross_excess: f64,
    /// `(k, η)` attaining `max_budget_violation`.
    pub worst_mode: (i64, f64),
}

/// Runs the audit with `A = m_L^{-1}` for every `(k, η)` of the sweep.
pub fn linear_sweep(cfg: &SweepConfig, lp: &LinearParams, params: &WeightParams) -> Result<(Vec<SweepRow>, SweepSummary)> {
    cfg.validate()?;
    params.validate()?;
    let modes: Vec<(i64, f64)> = (cfg.k_min..=cfg.k_max).flat_map(|k| cfg.etas().into_iter().map(move |e| (k, e))).collect();
    let weight = EnergyWeight::InverseLinear(params.clone());
    let per_mode: Vec<_> = modes
        .par_iter()
        .map(|&(k, eta)| {
            let s0 = ModeState {
                k,
                eta,
                g: Complex64::new(cfg.g0[0], cfg.g0[1]),
                phi: Complex64::new(cfg.phi0[0], cfg.phi0[1]),
                t: 0.0,
            };
            let tr = integrate_mode(&s0, cfg.t_end, cfg.rtol, lp, &weight)?;
            let rep = mode_energy_report(&tr);
            let mut rows = Vec::new();
            let mut next = 0.0;
            for (s, r) in tr.samples.iter().zip(&rep.samples) {
                if s.t + 1e-12 >= next {
                    rows.push(SweepRow {
                        k,
                        eta,
                        t: s.t,
                        abs_g: s.g.norm(),
                        abs_phi: s.phi.norm(),
                        e_weighted: s.energy,
                        residual: r.residual,
                    });
                    while next <= s.t + 1e-12 {
                        next += cfg.output_dt;
                    }
                }
            }
            Ok((rows, rep, tr.stats.accepted + tr.stats.rejected))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut summary = SweepSummary {
        modes: modes.len(),
        steps: 0,
        max_increase: 0.0,
        max_budget_violation: 0.0,
        max_residual: 0.0,
        max_literal_residual: 0.0,
        max_cross_excess: 0.0,
        worst_mode: modes[0],
    };
    for (r, rep, steps) in per_mode {
        rows.extend(r);
        summary.steps += steps;
        summary.max_increase = summary.max_increase.max(rep.max_increase);
        if rep.max_budget_violation > summary.max_budget_violation {
            summary.max_budget_violation = rep.max_budget_violation;
            summary.worst_mode = (rep.k, rep.eta);
        }
        summary.max_residual = summary.max_residual.max(rep.max_residual);
        summary.max_literal_residual = summary.max_literal_residual.max(rep.max_literal_residual);
        summary.max_cross_excess = summary.max_cross_excess.max(rep.max_cross_excess);
    }
    Ok((rows, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_of_eta_values() {
        let e = SweepConfig::default().etas();
        assert_eq!(e.len(), 129);
        assert_eq!((e[0], e[64], e[128]), (-32.0, 0.0, 32.0));
    }

    #[test]
    fn small_sweep_is_monotone() {
        let cfg = SweepConfig {
            k_max: 2,
            eta_min: -4.0,
            eta_max: 4.0,
            eta_count: 5,
            t_end: 20.0,
            ..Default::default()
        };
        let (rows, s) = linear_sweep(&cfg, &LinearParams::default(), &WeightParams::default()).unwrap();
        assert_eq!(s.modes, 10);
        assert!(!rows.is_empty());
        assert!(s.max_increase <= 1e-6 && s.max_budget_violation <= 1e-6, "{s:?}");
    }
}
