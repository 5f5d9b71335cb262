use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::p_symbol;

/// Viscosity `ν` and background field strength `α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearParams {
    pub nu: f64,
    pub alpha: f64,
}

impl Default for LinearParams {
    fn default() -> Self {
        Self { nu: 1.0, alpha: 1.0 }
    }
}

impl LinearParams {
    pub(crate) fn check(&self) -> Result<()> {
        if !(self.nu > 0.0) || !self.nu.is_finite() {
            return Err(Error::Domain(format!("the (G, phi) system needs nu > 0, got {}", self.nu)));
        }
        if !self.alpha.is_finite() {
            return Err(Error::Config("alpha must be finite".into()));
        }
        Ok(())
    }
}

/// One Fourier mode of `(G, φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeState {
    pub k: i64,
    pub eta: f64,
    pub g: Complex64,
    pub phi: Complex64,
    pub t: f64,
}

/// `(ν p, dG + νpG, dφ)`: the stiff rate and the remaining right-hand side.
#[inline]
pub(crate) fn split_rhs(k: i64, eta: f64, t: f64, g: Complex64, phi: Complex64, lp: &LinearParams) -> (f64, Complex64, Complex64) {
    let kf = k as f64;
    let (nu, al) = (lp.nu, lp.alpha);
    let s = eta - kf * t;
    let p = p_symbol(kf, eta, t);
    let ak2 = al * al * kf * kf / (nu * p);
    let dg = g * (2.0 * kf * s / p + ak2) + Complex64::new(0.0, al * al * al * kf * kf * kf / (nu * p * p)) * phi;
    let dphi = Complex64::new(0.0, al * kf / nu) * g - phi * ak2;
    (nu * p, dg, dphi)
}

/// Right-hand side `(dG, dφ)` of the decoupled linear system.
pub fn linear_rhs_mode(state: &ModeState, lp: &LinearParams) -> Result<(Complex64, Complex64)> {
    if state.k == 0 {
        return Err(Error::Domain("k = 0 modes are decoupled heat flow".into()));
    }
    lp.check()?;
    let (stiff, dg, dphi) = split_rhs(state.k, state.eta, state.t, state.g, state.phi, lp);
    Ok((dg - state.g * stiff, dphi))
}

/// `∫_a^b (k² + (η − kτ)²) dτ`, written to avoid cancellation for short intervals.
pub fn p_integral(k: i64, eta: f64, a: f64, b: f64) -> f64 {
    let kf = k as f64;
    let x = eta - kf * a;
    let y = eta - kf * b;
    (b - a) * (kf * kf + (x * x + x * y + y * y) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(k: i64, eta: f64, t: f64, g: Complex64, phi: Complex64) -> ModeState {
        ModeState { k, eta, g, phi, t }
    }

    #[test]
    fn zero_state() {
        let z = Complex64::new(0.0, 0.0);
        assert_eq!(linear_rhs_mode(&st(3, 2.0, 1.0, z, z), &LinearParams::default()).unwrap(), (z, z));
    }

    #[test]
    fn resonant_instant() {
        let g = Complex64::new(0.3, -1.1);
        let phi = Complex64::new(-0.7, 0.4);
        let (dg, dphi) = linear_rhs_mode(&st(1, 2.5, 2.5, g, phi), &LinearParams::default()).unwrap();
        let i = Complex64::i();
        assert!((dg - i * phi).norm() < 1e-15);
        assert!((dphi - (i * g - phi)).norm() < 1e-15);
    }

    #[test]
    fn unit_g_at_origin() {
        let (dg, dphi) = linear_rhs_mode(&st(1, 0.0, 0.0, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)), &LinearParams::default()).unwrap();
        assert!(dg.norm() < 1e-15);
        assert!((dphi - Complex64::i()).norm() < 1e-15);
    }

    #[test]
    fn zero_k_rejected() {
        let z = Complex64::new(0.0, 0.0);
        assert!(matches!(linear_rhs_mode(&st(0, 1.0, 0.0, z, z), &LinearParams::default()), Err(Error::Domain(_))));
    }

    #[test]
    fn matches_vorticity_form_by_chain_rule() {
        // G = −(νw + iαkφ)/p with w' = −νp w − iαkp φ, φ' = −(iαk/p) w
        let lp = LinearParams { nu: 0.37, alpha: 1.9 };
        let (k, eta, t) = (3i64, -5.5, 0.8);
        let kf = k as f64;
        let i = Complex64::i();
        let w = Complex64::new(0.4, 1.3);
        let phi = Complex64::new(-0.2, 0.9);
        let p = |t: f64| p_symbol(kf, eta, t);
        let gof = |t: f64, w: Complex64, phi: Complex64| -(lp.nu * w + i * lp.alpha * kf * phi) / p(t);
        let dw = -lp.nu * p(t) * w - i * lp.alpha * kf * p(t) * phi;
        let dphi = -i * lp.alpha * kf / p(t) * w;
        let h = 1e-6;
        let fd = (gof(t + h, w + h * dw, phi + h * dphi) - gof(t - h, w - h * dw, phi - h * dphi)) / (2.0 * h);
        let g = gof(t, w, phi);
        let (dg, dphi2) = linear_rhs_mode(&st(k, eta, t, g, phi), &lp).unwrap();
        assert!((dg - fd).norm() < 1e-7 * dg.norm().max(1.0), "{dg} vs {fd}");
        assert!((dphi2 - dphi).norm() < 1e-12);
    }

    #[test]
    fn p_integral_matches_cubic_difference() {
        let (k, eta, a, b) = (4i64, 7.0, 0.3, 5.1);
        let kf = k as f64;
        let direct = kf * kf * (b - a) + ((eta - kf * a).powi(3) - (eta - kf * b).powi(3)) / (3.0 * kf);
        assert!((p_integral(k, eta, a, b) - direct).abs() < 1e-12 * direct.abs());
    }
}
