use serde::Serialize;

use super::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};

/// Centered residual of the energy identity along a uniformly sampled run.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualSeries {
    /// Sampling step.
    pub h: f64,
    pub t: Vec<f64>,
    pub residual: Vec<f64>,
    /// `max |r(t)|`.
    pub max_abs: f64,
    /// `max E(t)` over all samples.
    pub max_energy: f64,
}

impl ResidualSeries {
    /// `max |r| / max E`.
    pub fn relative_max(&self) -> f64 {
        if self.max_energy > 0.0 {
            self.max_abs / self.max_energy
        } else {
            self.max_abs
        }
    }
}

fn uniform_step(records: &[DiagnosticsRecord]) -> Result<f64> {
    if records.len() < 3 {
        return Err(Error::Contract(format!(
            "energy identity residual needs at least 3 samples, got {}",
            records.len()
        )));
    }
    let h = records[1].t - records[0].t;
    if !(h > 0.0) {
        return Err(Error::Contract("sample times must increase".into()));
    }
    for w in records.windows(2) {
        if ((w[1].t - w[0].t) - h).abs() > 1e-9 * h.max(w[1].t.abs()) {
            return Err(Error::Contract(format!("samples are not uniformly spaced near t = {}", w[0].t)));
        }
    }
    Ok(h)
}

fn series(records: &[DiagnosticsRecord], h: f64, derivative: impl Fn(usize) -> f64) -> ResidualSeries {
    let mut t = Vec::with_capacity(records.len() - 2);
    let mut residual = Vec::with_capacity(records.len() - 2);
    for i in 1..records.len() - 1 {
        let r = &records[i];
        t.push(r.t);
        residual.push(derivative(i) + r.dissipation() - r.identity_rhs());
    }
    let max_abs = residual.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let max_energy = records.iter().fold(0.0f64, |m, r| m.max(r.e));
    ResidualSeries {
        h,
        t,
        residual,
        max_abs,
        max_energy,
    }
}

/// `r(t) = [E(t+h) − E(t−h)]/(2h) + (dissipation at t) − (L_{G,φ} + ΣNL at t)` at every
/// interior sample.
pub fn energy_identity_residual(records: &[DiagnosticsRecord]) -> Result<ResidualSeries> {
    let h = uniform_step(records)?;
    Ok(series(records, h, |i| (records[i + 1].e - records[i - 1].e) / (2.0 * h)))
}

/// Residual with the weight frozen at the center time: `e_minus[i]` and `e_plus[i]` are
/// `½(‖A(t_i)G‖² + ‖A(t_i)φ‖²)` evaluated on the states at `t_{i−1}` and `t_{i+1}`.
///
/// The weight-derivative terms `D_λ, D_m, D_q` then drop out of both sides, leaving
/// `[E_{A(t)}(t+h) − E_{A(t)}(t−h)]/(2h) + D_G + D_φ − (L_{G,φ} + ΣNL)`.
pub fn frozen_identity_residual(records: &[DiagnosticsRecord], e_minus: &[f64], e_plus: &[f64]) -> Result<ResidualSeries> {
    let h = uniform_step(records)?;
    if e_minus.len() != records.len() || e_plus.len() != records.len() {
        return Err(Error::Contract("frozen energies must align with the records".into()));
    }
    let mut out = series(records, h, |i| (e_plus[i] - e_minus[i]) / (2.0 * h));
    for (r, rec) in out.residual.iter_mut().zip(&records[1..records.len() - 1]) {
        *r += -(rec.d_lambda + rec.d_m + rec.d_q_weight);
    }
    out.max_abs = out.residual.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinear::{diagnostics, nonlinear_rhs, DiagnosticsConfig, FlowState};
    use crate::spectral::{p_symbol, Grid};
    use crate::weights::{WeightParams, WeightTable};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn rec(t: f64, e: f64) -> DiagnosticsRecord {
        DiagnosticsRecord {
            t,
            e,
            ..Default::default()
        }
    }

    #[test]
    fn needs_three_uniform_samples() {
        assert!(matches!(energy_identity_residual(&[rec(0.0, 1.0), rec(0.1, 1.0)]), Err(Error::Contract(_))));
        let bad = [rec(0.0, 1.0), rec(0.1, 1.0), rec(0.3, 1.0)];
        assert!(energy_identity_residual(&bad).is_err());
    }

    #[test]
    fn zero_state_gives_zero_residual() {
        let recs: Vec<_> = (0..5).map(|i| rec(0.05 * i as f64, 0.0)).collect();
        let s = energy_identity_residual(&recs).unwrap();
        assert_eq!(s.residual.len(), 3);
        assert_eq!(s.max_abs, 0.0);
    }

    #[test]
    fn centered_difference_of_quadratic_energy_is_exact() {
        let recs: Vec<_> = (0..6)
            .map(|i| {
                let t = 0.1 * i as f64;
                DiagnosticsRecord {
                    t,
                    e: t * t,
                    d_g: 1.0,
                    l_g_phi: 1.0 + 2.0 * t,
                    ..Default::default()
                }
            })
            .collect();
        let s = energy_identity_residual(&recs).unwrap();
        assert!(s.max_abs < 1e-13);
    }

    /// With exact time derivatives, `⟨AG, A∂_tG⟩ + ⟨Aφ, A∂_tφ⟩ = −D_G − D_φ + L + ΣNL`.
    #[test]
    fn inner_products_close_the_identity() {
        let grid = Arc::new(Grid::new(16, 32, 4.0 * PI, 2.0 / 3.0).unwrap());
        let (nu, alpha, t) = (0.7, 1.4, 2.3);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut s = FlowState::zeros(grid.clone(), t);
        for k in 0..=4i64 {
            for m in -8..=8i64 {
                if k == 0 && m <= 0 {
                    continue;
                }
                let mut c = || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * 0.2;
                s.phi.set_real_pair(k, m, c()).unwrap();
                if k > 0 {
                    s.g.set_real_pair(k, m, c()).unwrap();
                } else {
                    s.v0x.set_real_pair(k, m, c()).unwrap();
                }
            }
        }
        let table = WeightTable::new(WeightParams::default(), grid.clone(), t).unwrap();
        let cfg = DiagnosticsConfig { nu, alpha, k0: 4 };
        let r = diagnostics(&s, &table, &cfg).unwrap();
        let (w, phi, v0) = crate::nonlinear::from_good_unknowns(&s, nu, alpha).unwrap();
        let (dw, dphi, _) = nonlinear_rhs(&w, &phi, &v0, t, nu, alpha).unwrap();
        let mut de = 0.0;
        for i in 0..grid.len() {
            let a2 = (2.0 * table.entry(i).log_a).exp();
            let (k, eta) = grid.mode(i);
            let kf = k as f64;
            de += a2 * (phi.coeffs()[i].conj() * dphi.coeffs()[i]).re;
            if i < grid.n_y() {
                continue;
            }
            let p = p_symbol(kf, eta, t);
            let g = s.g.coeffs()[i];
            let dg = -(nu * dw.coeffs()[i] + Complex64::new(0.0, alpha * kf) * dphi.coeffs()[i]) / p
                + 2.0 * kf * (eta - kf * t) / p * g;
            de += a2 * (g.conj() * dg).re;
        }
        let expect = -(r.d_g + r.d_phi) + r.identity_rhs();
        let scale = r.d_g + r.d_phi + r.l_g_phi.abs() + r.nl_g.abs() + r.nl_phi_to_g.abs() + r.nl_g_to_phi.abs() + r.nl_phi.abs();
        assert!((de - expect).abs() <= 1e-11 * scale, "{de} vs {expect}");
        assert!(r.nl_g.abs() + r.nl_phi_to_g.abs() > 1e-6 * scale);
    }
}
