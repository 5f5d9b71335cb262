//! Three-mode resonance model and chained echo cascades.
//!
//! For a fixed vertical frequency `η` and `τ = t − η/k` the model reads
//!
//! ```text
//! G'      = −k²(1 + τ²) G + ε t (η/k) (1 + |τ|)^{-1} φ(k+1)
//! φ(k+1)' = ε t k G
//! φ(k)'   = i k G
//! ```
//!
//! integrated over `t ∈ [η/k − W η/(2k³), η/k + W η/(2k³)]` (clamped at `t = 0`). Far
//! from `η/k` the dissipation `k²τ²` makes `G` stiff and slaved, so the system is
//! integrated with an L-stable implicit method.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{radau5_linear, RadauOptions};
use crate::quad;

/// Largest admissible `ε·η`; beyond it `φ(k+1)` grows past the range of `f64`.
pub const OVERFLOW_GUARD: f64 = 1e3;

/// Strength of the low-mode coupling in each link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Coupling {
    /// The same `ε` for every link.
    Fixed { epsilon: f64 },
    /// `ε_k = δ (k/η)^{3/2}`, which puts the resonant time `η/k` at `ε t^{3/2} = δ`.
    RegimeBoundary { delta: f64 },
}

impl Coupling {
    /// Coupling used by the link at `k`.
    pub fn epsilon(&self, eta: f64, k: u32) -> f64 {
        match *self {
            Coupling::Fixed { epsilon } => epsilon,
            Coupling::RegimeBoundary { delta } => delta * (k as f64 / eta).powf(1.5),
        }
    }
}

fn default_window() -> f64 {
    8.0
}

fn default_phi_next() -> f64 {
    1.0
}

fn default_rtol() -> f64 {
    1e-9
}

/// Parameters of a single link or a chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EchoConfig {
    pub eta: f64,
    /// First (highest) link of a chain.
    pub k_start: u32,
    pub coupling: Coupling,
    /// Window length in units of the resonant half-width `η/(2k³)`.
    #[serde(default = "default_window")]
    pub window: f64,
    /// Initial `G(k)`.
    #[serde(default)]
    pub g0: f64,
    /// Initial `φ(k+1)`.
    #[serde(default = "default_phi_next")]
    pub phi_next0: f64,
    /// Initial `φ(k)`.
    #[serde(default)]
    pub phi_k0: f64,
    #[serde(default = "default_rtol")]
    pub rtol: f64,
}

impl EchoConfig {
    pub fn new(eta: f64, k_start: u32, coupling: Coupling) -> Self {
        Self {
            eta,
            k_start,
            coupling,
            window: default_window(),
            g0: 0.0,
            phi_next0: default_phi_next(),
            phi_k0: 0.0,
            rtol: default_rtol(),
        }
    }

    /// `⌊η^{1/3}⌋`, the last frequency with a nontrivial resonant interval.
    pub fn k_max(&self) -> u32 {
        let k = self.eta.cbrt().floor();
        // cbrt can land just below an exact cube.
        if (k + 1.0).powi(3) <= self.eta {
            k as u32 + 1
        } else {
            k as u32
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta >= 8.0) || !self.eta.is_finite() {
            return Err(Error::Config(format!("eta must be at least 8, got {}", self.eta)));
        }
        if self.k_start == 0 || self.k_start > self.k_max() {
            return Err(Error::Config(format!(
                "k_start must lie in 1..={}, got {}",
                self.k_max(),
                self.k_start
            )));
        }
        match self.coupling {
            Coupling::Fixed { epsilon } => {
                if !(0.0..1.0).contains(&epsilon) {
                    return Err(Error::Config(format!("epsilon must lie in [0, 1), got {epsilon}")));
                }
                if epsilon * self.eta > OVERFLOW_GUARD {
                    return Err(Error::Config(format!(
                        "epsilon * eta = {} exceeds the overflow guard {OVERFLOW_GUARD}",
                        epsilon * self.eta
                    )));
                }
            }
            Coupling::RegimeBoundary { delta } => {
                if !(delta > 0.0 && delta <= 10.0) {
                    return Err(Error::Config(format!("delta must lie in (0, 10], got {delta}")));
                }
            }
        }
        if !(self.window.is_finite() && self.window > 0.0) {
            return Err(Error::Config(format!("window must be positive, got {}", self.window)));
        }
        if !(self.rtol > 0.0 && self.rtol < 1e-3) {
            return Err(Error::Config(format!("rtol must lie in (0, 1e-3), got {}", self.rtol)));
        }
        for (name, v) in [("g0", self.g0), ("phi_next0", self.phi_next0), ("phi_k0", self.phi_k0)] {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite")));
            }
        }
        Ok(())
    }
}

/// Outcome of one resonant link `φ(k+1) → φ(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EchoLink {
    pub k: u32,
    pub epsilon: f64,
    pub t_start: f64,
    pub t_end: f64,
    /// `|φ(k)(t_end) − φ(k)(t_start)| / |φ(k+1)(t_start)|`; zero when the input vanishes.
    pub gain_down: f64,
    /// `|φ(k+1)(t_end)| / |φ(k+1)(t_start)|`; one when the input vanishes.
    pub gain_next: f64,
    /// `η^{1/2}/k^{3/2}`.
    pub predicted: f64,
    /// Gain of the reduced equation `φ(k)' = ε t (η/k²)⟨τ⟩^{-3} φ(k+1)` with `φ(k+1)` frozen.
    pub heuristic: f64,
    /// `G(k)` at `t = η/k`.
    pub g_center: f64,
    /// Quasi-static value `ε t (η/k³) φ(k+1)` at `t = η/k`, with `φ(k+1)` taken at that time.
    pub g_quasi_static: f64,
    /// `φ(k+1)` and `φ(k)` at `t_end`; `φ(k)` carries a real and an imaginary part.
    pub phi_next_end: f64,
    pub phi_k_end: [f64; 2],
}

/// `η^{1/2}/k^{3/2}`.
pub fn predicted_gain(eta: f64, k: u32) -> f64 {
    eta.sqrt() / (k as f64).powf(1.5)
}

/// `ε^{-2/3}`, the time at which `ε t^{3/2} = 1`.
pub fn regime_time_scale(epsilon: f64) -> f64 {
    epsilon.powf(-2.0 / 3.0)
}

/// Integrates one link of the model at frequency `k`.
pub fn three_mode_integrate(cfg: &EchoConfig, k: u32) -> Result<EchoLink> {
    if k == 0 {
        return Err(Error::Domain("the link frequency k must be positive".into()));
    }
    if !(cfg.window >= 4.0) {
        return Err(Error::Domain(format!("window must be at least 4, got {}", cfg.window)));
    }
    let eta = cfg.eta;
    let kf = k as f64;
    let eps = cfg.coupling.epsilon(eta, k);
    let center = eta / kf;
    let half = cfg.window * eta / (2.0 * kf.powi(3));
    let t_start = (center - half).max(0.0);
    let t_end = center + half;

    let matrix = |t: f64| {
        let tau = t - center;
        [
            [-kf * kf * (1.0 + tau * tau), eps * t * (eta / kf) / (1.0 + tau.abs()), 0.0],
            [eps * t * kf, 0.0, 0.0],
            [kf, 0.0, 0.0],
        ]
    };
    let opts = RadauOptions {
        rtol: cfg.rtol,
        ..Default::default()
    };
    let y0 = [cfg.g0, cfg.phi_next0, 0.0];
    let (mid, _) = radau5_linear(matrix, t_start, y0, center, &opts)?;
    let (end, _) = radau5_linear(matrix, center, mid, t_end, &opts)?;
    for v in end {
        if !v.is_finite() {
            return Err(Error::Integration {
                t: t_end,
                reason: "three-mode state overflowed".into(),
            });
        }
    }

    let input = cfg.phi_next0.abs();
    let (gain_down, gain_next) = if input > 0.0 {
        (end[2].abs() / input, end[1].abs() / input)
    } else {
        (0.0, 1.0)
    };
    let kernel = |t: f64| {
        let tau = t - center;
        t / (1.0 + tau * tau).powf(1.5)
    };
    let heuristic = eps * eta / (kf * kf) * quad::integrate_with_breaks(kernel, t_start, t_end, &[center], 1e-12).value;
    Ok(EchoLink {
        k,
        epsilon: eps,
        t_start,
        t_end,
        gain_down,
        gain_next,
        predicted: predicted_gain(eta, k),
        heuristic,
        g_center: mid[0],
        g_quasi_static: eps * center * eta / kf.powi(3) * mid[1],
        phi_next_end: end[1],
        phi_k_end: [cfg.phi_k0, end[2]],
    })
}

/// Links of a chain from `k_start` down to 1 and the accumulated growth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainResult {
    pub eta: f64,
    pub links: Vec<EchoLink>,
    /// `Σ log gain_down`.
    pub log_growth: f64,
    /// `Σ log(η^{1/2}/k^{3/2})` over the same links.
    pub predicted_log_growth: f64,
}

/// Runs the cascade `φ(k_start+1) → φ(k_start) → … → φ(1)`, feeding each link's output
/// amplitude into the next link as its `φ(k+1)`.
pub fn chain_run(cfg: &EchoConfig) -> Result<ChainResult> {
    cfg.validate()?;
    if cfg.k_start < 2 {
        return Err(Error::Config(format!("a chain needs k_start >= 2, got {}", cfg.k_start)));
    }
    let mut links = Vec::with_capacity(cfg.k_start as usize);
    let mut link_cfg = *cfg;
    let mut log_growth = 0.0;
    let mut predicted_log_growth = 0.0;
    for k in (1..=cfg.k_start).rev() {
        let link = three_mode_integrate(&link_cfg, k)?;
        log_growth += link.gain_down.ln();
        predicted_log_growth += link.predicted.ln();
        // Each link is linear in its input, so the amplitude is carried as a scale.
        link_cfg.phi_next0 = link.gain_down * link_cfg.phi_next0.abs();
        link_cfg.g0 = 0.0;
        link_cfg.phi_k0 = 0.0;
        links.push(link);
        if link_cfg.phi_next0 == 0.0 {
            break;
        }
    }
    Ok(ChainResult {
        eta: cfg.eta,
        links,
        log_growth,
        predicted_log_growth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixed(eta: f64, eps: f64) -> EchoConfig {
        EchoConfig::new(eta, 2, Coupling::Fixed { epsilon: eps })
    }

    #[test]
    fn formulas() {
        assert!((predicted_gain(100.0, 1) - 10.0).abs() < 1e-12);
        assert!((predicted_gain(27.0, 3) - 1.0).abs() < 1e-12);
        assert!((regime_time_scale(1e-6) - 1e4).abs() < 1e-8);
    }

    #[test]
    fn k_max_handles_exact_cubes() {
        assert_eq!(fixed(1000.0, 0.0).k_max(), 10);
        assert_eq!(fixed(999.0, 0.0).k_max(), 9);
        assert_eq!(fixed(1e5, 0.0).k_max(), 46);
    }

    #[test]
    fn validation() {
        assert!(fixed(7.0, 1e-3).validate().is_err());
        assert!(fixed(1e4, 1.5).validate().is_err());
        assert!(fixed(1e6, 0.5).validate().is_err());
        let mut c = fixed(1e3, 1e-4);
        c.k_start = 11;
        assert!(c.validate().is_err());
        c.k_start = 10;
        assert!(c.validate().is_ok());
        c.window = 2.0;
        assert!(three_mode_integrate(&c, 3).is_err());
    }

    #[test]
    fn no_coupling_means_no_transfer() {
        let l = three_mode_integrate(&fixed(1e4, 0.0), 3).unwrap();
        assert_eq!(l.gain_down, 0.0);
        assert_eq!(l.gain_next, 1.0);
    }

    #[test]
    fn zero_input_stays_zero() {
        let mut c = fixed(1e4, 1e-6);
        c.phi_next0 = 0.0;
        let l = three_mode_integrate(&c, 3).unwrap();
        assert_eq!((l.gain_down, l.gain_next, l.g_center, l.phi_next_end), (0.0, 1.0, 0.0, 0.0));
    }

    #[test]
    fn initial_g_decays() {
        let mut c = fixed(1e4, 0.0);
        c.g0 = 1.0;
        let l = three_mode_integrate(&c, 3).unwrap();
        assert!(l.g_center.abs() < 1e-30, "{}", l.g_center);
        // φ(k) absorbs k ∫ G ≈ k / (k²(1 + τ₀²)) with τ₀ the window start relative to η/k.
        let tau0 = l.t_start - 1e4 / 3.0;
        let expect = 1.0 / (3.0 * (1.0 + tau0 * tau0));
        assert!((l.phi_k_end[1] / expect - 1.0).abs() < 1e-3, "{} vs {expect}", l.phi_k_end[1]);
    }

    #[test]
    fn gain_is_linear_in_small_coupling() {
        let a = three_mode_integrate(&fixed(1e4, 1e-7), 3).unwrap();
        let b = three_mode_integrate(&fixed(1e4, 2e-7), 3).unwrap();
        let r = b.gain_down / a.gain_down;
        assert!((r - 2.0).abs() < 0.1, "ratio {r}");
    }

    /// `k ∫ G dt ≈ ε η²/k³ ∫ dτ / ((1+|τ|)(1+τ²)) = (π/2) ε η²/k³` when `G` is slaved.
    #[test]
    fn small_coupling_matches_quasi_static_integral() {
        let (eta, eps) = (1e4, 1e-7);
        for k in [3u32, 5, 10, 20] {
            let l = three_mode_integrate(&fixed(eta, eps), k).unwrap();
            let qs = std::f64::consts::FRAC_PI_2 * eps * eta * eta / (k as f64).powi(3);
            assert!((l.gain_down / qs - 1.0).abs() < 0.1, "k={k}: {} vs {qs}", l.gain_down);
        }
    }

    #[test]
    fn g_relaxes_to_quasi_static_value() {
        for k in [3u32, 10] {
            let l = three_mode_integrate(&fixed(1e4, 1e-7), k).unwrap();
            let r = l.g_center / l.g_quasi_static;
            assert!((0.5..=2.0).contains(&r), "k={k}: ratio {r}");
        }
    }

    #[test]
    fn fixed_coupling_gain_matches_prediction() {
        let l = three_mode_integrate(&fixed(1e4, 1e-4), 3).unwrap();
        let r = l.gain_down / l.predicted;
        assert!((0.5..=2.0).contains(&r), "gain {} vs predicted {} (ratio {r:e})", l.gain_down, l.predicted);
    }

    /// At `ε t^{3/2} = 1` the quasi-static gain is `(π/2) η^{1/2}/k^{3/2}`.
    #[test]
    fn regime_boundary_gain_approaches_quasi_static_constant() {
        let c = EchoConfig::new(1e5, 46, Coupling::RegimeBoundary { delta: 1.0 });
        for k in [20u32, 30, 45] {
            let l = three_mode_integrate(&c, k).unwrap();
            let r = l.gain_down / l.predicted / std::f64::consts::FRAC_PI_2;
            assert!((r - 1.0).abs() < 0.05, "k={k}: ratio {r}");
        }
    }

    #[test]
    fn single_link_chain_reproduces_link() {
        let c = EchoConfig::new(1e3, 2, Coupling::RegimeBoundary { delta: 1.0 });
        let chain = chain_run(&c).unwrap();
        let l2 = three_mode_integrate(&c, 2).unwrap();
        assert_eq!(chain.links[0], l2);
        assert_eq!(chain.links.len(), 2);
        assert!((chain.log_growth - (l2.gain_down.ln() + chain.links[1].gain_down.ln())).abs() < 1e-12);
    }

    #[test]
    fn chain_gains_decrease_in_k() {
        let c = EchoConfig::new(1e4, 21, Coupling::RegimeBoundary { delta: 1.0 });
        let chain = chain_run(&c).unwrap();
        assert_eq!(chain.links.len(), 21);
        for w in chain.links.windows(2) {
            assert!(w[0].k > w[1].k && w[0].gain_down < w[1].gain_down, "k={} vs k={}", w[0].k, w[1].k);
        }
    }

    #[test]
    fn chain_input_scale_is_irrelevant() {
        let mut c = EchoConfig::new(1e3, 10, Coupling::RegimeBoundary { delta: 1.0 });
        let a = chain_run(&c).unwrap();
        c.phi_next0 = 1e-5;
        let b = chain_run(&c).unwrap();
        assert!((a.log_growth - b.log_growth).abs() < 1e-6 * a.log_growth.abs());
    }
}
