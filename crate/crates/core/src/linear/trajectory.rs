use num_complex::Complex64;
use serde::Serialize;

use super::rhs::{p_integral, split_rhs, LinearParams, ModeState};
use crate::error::{Error, Result};
use crate::ode::{lawson_dopri5, Dopri5Options, Dopri5Stats};
use crate::weights::{dt_lambda, dt_log_m, dt_log_ml, dq_ratio, lambda_at, log_a_parts, log_m_between, log_ml, log_q, WeightParams};

/// Multiplier `A` used for the mode energy `½(|AG|² + |Aφ|²)`.
#[derive(Debug, Clone, PartialEq)]
pub enum EnergyWeight {
    /// `A = 1`.
    Unit,
    /// `A = m_L^{-1}`.
    InverseLinear(WeightParams),
    /// The full multiplier `A` of the nonlinear energy.
    Full(WeightParams),
}

/// Evaluates `log A` and `∂_t A / A` along increasing times, caching `log m`.
pub(crate) struct WeightTracker<'a> {
    weight: &'a EnergyWeight,
    k: i64,
    eta: f64,
    t_m: f64,
    log_m: f64,
}

impl<'a> WeightTracker<'a> {
    pub(crate) fn new(weight: &'a EnergyWeight, k: i64, eta: f64, t0: f64) -> Self {
        let log_m = match weight {
            EnergyWeight::Full(p) => log_m_between(0.0, t0, k, eta, p),
            _ => 0.0,
        };
        Self {
            weight,
            k,
            eta,
            t_m: t0,
            log_m,
        }
    }

    /// `(log A, ∂_t A / A)` at `t` (non-decreasing between calls).
    pub(crate) fn at(&mut self, t: f64) -> (f64, f64) {
        let (k, eta) = (self.k, self.eta);
        match self.weight {
            EnergyWeight::Unit => (0.0, 0.0),
            EnergyWeight::InverseLinear(p) => (-log_ml(t, k, eta, p), -dt_log_ml(t, k, eta)),
            EnergyWeight::Full(p) => {
                if t > self.t_m {
                    self.log_m += log_m_between(self.t_m, t, k, eta, p);
                    self.t_m = t;
                }
                let lq = log_q(t, k, eta, p);
                let (la, lat) = log_a_parts(k, eta, lambda_at(t, p), self.log_m, lq, p);
                let gev = dt_lambda(t, p) * ((k.abs() as f64) + eta.abs()).powf(p.s);
                let share = (lat - la).exp();
                (la, -dt_log_m(t, k, eta, p) - share * dq_ratio(t, k, eta, p) + gev)
            }
        }
    }
}

/// One stored point of a mode trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeSample {
    pub t: f64,
    pub g: Complex64,
    pub phi: Complex64,
    /// `log A(t,k,η)`.
    pub log_weight: f64,
    /// `∂_t A / A`.
    pub dlog_weight: f64,
    /// `½ A² (|G|² + |φ|²)`.
    pub energy: f64,
}

/// Accepted-step samples of one mode.
#[derive(Debug, Clone)]
pub struct ModeTrajectory {
    pub k: i64,
    pub eta: f64,
    pub params: LinearParams,
    pub samples: Vec<ModeSample>,
    pub stats: Dopri5Stats,
}

impl ModeTrajectory {
    pub fn last(&self) -> Option<&ModeSample> {
        self.samples.last()
    }
}

fn check_args(init: &ModeState, t_end: f64, rtol: f64, lp: &LinearParams) -> Result<()> {
    if init.k == 0 {
        return Err(Error::Domain("k = 0 modes are decoupled heat flow".into()));
    }
    lp.check()?;
    if !(t_end > init.t) {
        return Err(Error::Contract(format!("t_end = {t_end} must exceed t0 = {}", init.t)));
    }
    if !(rtol > 1e-12 && rtol < 1e-3) {
        return Err(Error::Contract(format!("rtol = {rtol} must lie in (1e-12, 1e-3)")));
    }
    Ok(())
}

/// Largest stored step; keeps trajectories dense enough for sample-wise audits.
pub(crate) const SAMPLE_H_MAX: f64 = 0.1;

pub(crate) fn run_mode<O>(init: &ModeState, t_end: f64, rtol: f64, lp: &LinearParams, h_max: f64, mut observer: O) -> Result<(ModeState, Dopri5Stats)>
where
    O: FnMut(f64, Complex64, Complex64) -> bool,
{
    check_args(init, t_end, rtol, lp)?;
    let (k, eta, nu) = (init.k, init.eta, lp.nu);
    let opts = Dopri5Options {
        rtol,
        atol: 1e-300,
        h_max,
        ..Default::default()
    };
    let y0 = [init.g.re, init.g.im, init.phi.re, init.phi.im];
    let f = |t: f64, y: &[f64; 4]| {
        let (_, dg, dphi) = split_rhs(k, eta, t, Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3]), lp);
        [dg.re, dg.im, dphi.re, dphi.im]
    };
    let lf = |a: f64, b: f64| {
        let d = -nu * p_integral(k, eta, a, b);
        [d, d, 0.0, 0.0]
    };
    let (y, stats) = lawson_dopri5(f, lf, init.t, y0, t_end, &opts, |t, y| {
        observer(t, Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3]))
    })
    .map_err(|e| match e {
        Error::Integration { t, reason } => Error::Integration {
            t,
            reason: format!("mode (k = {k}, eta = {eta}): {reason}"),
        },
        other => other,
    })?;
    Ok((
        ModeState {
            k,
            eta,
            g: Complex64::new(y[0], y[1]),
            phi: Complex64::new(y[2], y[3]),
            t: t_end,
        },
        stats,
    ))
}

/// Integrates one mode to `t_end` with local tolerance `rtol`, storing every accepted step.
pub fn integrate_mode(init: &ModeState, t_end: f64, rtol: f64, lp: &LinearParams, weight: &EnergyWeight) -> Result<ModeTrajectory> {
    let mut tracker = WeightTracker::new(weight, init.k, init.eta, init.t);
    let mut samples = Vec::new();
    let (_, stats) = run_mode(init, t_end, rtol, lp, SAMPLE_H_MAX, |t, g, phi| {
        let (la, dla) = tracker.at(t);
        let energy = 0.5 * (2.0 * la).exp() * (g.norm_sqr() + phi.norm_sqr());
        samples.push(ModeSample {
            t,
            g,
            phi,
            log_weight: la,
            dlog_weight: dla,
            energy,
        });
        true
    })?;
    Ok(ModeTrajectory {
        k: init.k,
        eta: init.eta,
        params: *lp,
        samples,
        stats,
    })
}

/// Final state only, without step-size cap or storage.
pub fn integrate_mode_final(init: &ModeState, t_end: f64, rtol: f64, lp: &LinearParams) -> Result<ModeState> {
    Ok(run_mode(init, t_end, rtol, lp, f64::INFINITY, |_, _, _| true)?.0)
}
