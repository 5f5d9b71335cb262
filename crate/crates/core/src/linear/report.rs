use num_complex::Complex64;
use serde::Serialize;

use super::rhs::LinearParams;
use super::trajectory::ModeTrajectory;
use crate::spectral::p_symbol;
use crate::weights::dt_log_ml;

/// Energy bookkeeping of one stored sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeEnergySample {
    pub t: f64,
    pub energy: f64,
    /// `νp |AG|²`.
    pub diss_g: f64,
    /// `(α²/ν)(k²/p) |Aφ|²`.
    pub diss_phi: f64,
    /// Cross term `L_{G,φ}` restricted to the mode.
    pub l_gphi: f64,
    /// `dE/dt` from the right-hand side.
    pub de_dt: f64,
    /// `dE/dt + ½(diss_g + diss_phi)`; nonpositive when the monotone estimate holds.
    pub residual: f64,
    /// `½ d/dt(|AG|²+|Aφ|²) + ½p|AG|² + ½(k²/p)|Aφ|² + (∂_t m_L/m_L)(|AG|²+|Aφ|²)`.
    pub literal_residual: f64,
    /// `|L_{G,φ}| − ½ diss_g − ½ diss_phi − ½ (∂_t m_L/m_L)|Aφ|²`.
    pub cross_excess: f64,
    /// `E(t) + ½∫₀ᵗ (diss_g + diss_phi) dτ` by the trapezoid rule over samples.
    pub budget: f64,
}

/// Per-sample values and the worst violations of a mode trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeEnergyReport {
    pub k: i64,
    pub eta: f64,
    pub samples: Vec<ModeEnergySample>,
    /// `max (E_{i+1} − E_i) / E(0)`, clipped below at 0.
    pub max_increase: f64,
    /// `max (budget − E(0)) / E(0)`, clipped below at 0.
    pub max_budget_violation: f64,
    /// `max residual / E(0)`, clipped below at 0.
    pub max_residual: f64,
    /// `max literal_residual / E(0)`, clipped below at 0.
    pub max_literal_residual: f64,
    /// `max cross_excess / E(0)`, clipped below at 0.
    pub max_cross_excess: f64,
}

fn cross_term(k: i64, eta: f64, t: f64, ag: Complex64, aphi: Complex64, lp: &LinearParams) -> f64 {
    let kf = k as f64;
    let (nu, al) = (lp.nu, lp.alpha);
    let s = eta - kf * t;
    let p = p_symbol(kf, eta, t);
    let diag = (2.0 * kf * s / p + al * al * kf * kf / (nu * p)) * ag.norm_sqr();
    let c1 = ag.conj() * Complex64::new(0.0, al * al * al * kf * kf * kf / (nu * p * p)) * aphi;
    let c2 = aphi.conj() * Complex64::new(0.0, al * kf / nu) * ag;
    diag + c1.re + c2.re
}

/// Energy audit of a stored trajectory.
pub fn mode_energy_report(traj: &ModeTrajectory) -> ModeEnergyReport {
    let (k, eta, lp) = (traj.k, traj.eta, traj.params);
    let kf = k as f64;
    let mut out = Vec::with_capacity(traj.samples.len());
    let e0 = traj.samples.first().map_or(0.0, |s| s.energy);
    let mut integral = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for s in &traj.samples {
        let a = s.log_weight.exp();
        let (ag, aphi) = (s.g * a, s.phi * a);
        let p = p_symbol(kf, eta, s.t);
        let diss_g = lp.nu * p * ag.norm_sqr();
        let diss_phi = lp.alpha * lp.alpha / lp.nu * kf * kf / p * aphi.norm_sqr();
        let l = cross_term(k, eta, s.t, ag, aphi, &lp);
        let de_dt = 2.0 * s.dlog_weight * s.energy - diss_g - diss_phi + l;
        let d = diss_g + diss_phi;
        if let Some((tp, dp)) = prev {
            integral += 0.25 * (s.t - tp) * (d + dp);
        }
        prev = Some((s.t, d));
        let dml = dt_log_ml(s.t, k, eta);
        let tot = ag.norm_sqr() + aphi.norm_sqr();
        out.push(ModeEnergySample {
            t: s.t,
            energy: s.energy,
            diss_g,
            diss_phi,
            l_gphi: l,
            de_dt,
            residual: de_dt + 0.5 * d,
            literal_residual: de_dt + 0.5 * p * ag.norm_sqr() + 0.5 * kf * kf / p * aphi.norm_sqr() + dml * tot,
            cross_excess: l.abs() - 0.5 * diss_g - 0.5 * diss_phi - 0.5 * dml * aphi.norm_sqr(),
            budget: s.energy + integral,
        });
    }
    let rel = |x: f64| if e0 > 0.0 { x / e0 } else { x };
    let max_increase = out.windows(2).map(|w| rel(w[1].energy - w[0].energy)).fold(0.0, f64::max);
    let max_budget_violation = out.iter().map(|s| rel(s.budget - e0)).fold(0.0, f64::max);
    let max_residual = out.iter().map(|s| rel(s.residual)).fold(0.0, f64::max);
    let max_literal_residual = out.iter().map(|s| rel(s.literal_residual)).fold(0.0, f64::max);
    let max_cross_excess = out.iter().map(|s| rel(s.cross_excess)).fold(0.0, f64::max);
    ModeEnergyReport {
        k,
        eta,
        samples: out,
        max_increase,
        max_budget_violation,
        max_residual,
        max_literal_residual,
        max_cross_excess,
    }
}
