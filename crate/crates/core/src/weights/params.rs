use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Parameters of the multiplier family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeightParams {
    /// Sobolev exponent `N`.
    pub n: f64,
    /// Gevrey index `s ∈ (1/3, 1]`.
    pub s: f64,
    /// Initial radius `λ0`.
    pub lambda0: f64,
    /// Radius decay rate `ρ0 ∈ (0, 1)`.
    pub rho0: f64,
    /// Decay exponent `γ* ∈ (0, 3/2 (s − 1/3))`.
    pub gamma: f64,
    /// Exponent `ρ` of the `q` weight.
    pub rho: f64,
    /// Fixed truncation of the sup over `j` in the `m` rate; `None` uses `4(|k| + ⌈t²⌉)` capped at 10⁴.
    pub j_max: Option<u32>,
    /// Numerator of the `m` rate `gain / (1 + (η/j − t)²) ⟨k − j⟩^{-3}`.
    pub m_gain: f64,
}

impl Default for WeightParams {
    fn default() -> Self {
        Self {
            n: 6.0,
            s: 0.5,
            lambda0: 1.0,
            rho0: 0.1,
            gamma: 0.2,
            rho: 0.05,
            j_max: None,
            m_gain: 10.0,
        }
    }
}

impl WeightParams {
    /// Checks every parameter constraint, including positivity of `λ(∞)`.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.n >= 1.0) {
            return bad(format!("N = {} must be >= 1", self.n));
        }
        if !(self.s > 1.0 / 3.0 && self.s <= 1.0) {
            return bad(format!("s = {} must lie in (1/3, 1]", self.s));
        }
        if !(self.lambda0 > 0.0) {
            return bad(format!("lambda0 = {} must be positive", self.lambda0));
        }
        if !(self.rho0 > 0.0 && self.rho0 < 1.0) {
            return bad(format!("rho0 = {} must lie in (0, 1)", self.rho0));
        }
        let gmax = 1.5 * (self.s - 1.0 / 3.0);
        if !(self.gamma > 0.0 && self.gamma < gmax) {
            return bad(format!("gamma = {} must lie in (0, {gmax})", self.gamma));
        }
        if !(self.rho > 0.0) {
            return bad(format!("rho = {} must be positive", self.rho));
        }
        if self.j_max == Some(0) {
            return bad("j_max must be >= 1".into());
        }
        if !(self.m_gain > 0.0) {
            return bad(format!("m_gain = {} must be positive", self.m_gain));
        }
        let inf = self.lambda_infinity();
        if !(inf > 0.0) {
            return bad(format!("lambda(t) reaches {inf} <= 0 as t -> infinity"));
        }
        Ok(())
    }

    /// `∫₀^∞ ⟨τ⟩^{−(1+γ*)} dτ = (√π/2) Γ(γ*/2) / Γ((1+γ*)/2)`.
    pub fn radius_decay_integral(&self) -> f64 {
        0.5 * std::f64::consts::PI.sqrt() * gamma(0.5 * self.gamma) / gamma(0.5 * (1.0 + self.gamma))
    }

    /// `λ(∞) = λ0 − ρ0 ∫₀^∞ ⟨τ⟩^{−(1+γ*)} dτ`, the infimum of `λ`.
    pub fn lambda_infinity(&self) -> f64 {
        self.lambda0 - self.rho0 * self.radius_decay_integral()
    }
}
