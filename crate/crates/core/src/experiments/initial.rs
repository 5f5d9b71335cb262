use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::nonlinear::FlowState;
use crate::spectral::{p_symbol, Grid, SpectralField};

/// Unknown a recipe entry refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldChoice {
    Phi,
    G,
    V0x,
}

/// One prescribed coefficient `(k, m)`; its mirror `(−k, −m)` receives the conjugate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub field: FieldChoice,
    pub k: i64,
    /// Vertical index, `η = m · 2π/L_y`.
    pub m: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

fn default_fields() -> Vec<FieldChoice> {
    vec![FieldChoice::Phi, FieldChoice::G]
}

fn default_envelope_radius() -> f64 {
    0.5
}

fn default_envelope_s() -> f64 {
    0.5
}

/// Initial-data recipe. Both recipes are scaled so that
/// `(‖φ‖² + ‖G‖² + ‖v₀ˣ‖²)^{1/2} = ε` unless `normalize` is false.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "recipe", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialData {
    /// Explicit list of real mode pairs.
    Modes {
        modes: Vec<ModeSpec>,
        #[serde(default = "crate::experiments::initial::yes")]
        normalize: bool,
    },
    /// Uniform random coefficients on `k_min ≤ |k| ≤ k_max`, `|m| ≤ m_max` under the
    /// envelope `exp(−r (|k| + |η|)^s)`.
    Random {
        #[serde(default = "default_fields")]
        fields: Vec<FieldChoice>,
        k_min: i64,
        k_max: i64,
        m_max: i64,
        #[serde(default = "default_envelope_radius")]
        envelope_radius: f64,
        #[serde(default = "default_envelope_s")]
        envelope_s: f64,
        #[serde(default = "crate::experiments::initial::yes")]
        normalize: bool,
    },
}

pub(crate) fn yes() -> bool {
    true
}

impl InitialData {
    /// Random data on `1 ≤ |k| ≤ 4`, `|m| ≤ 8` for `φ` and `G`.
    pub fn default_random() -> Self {
        InitialData::Random {
            fields: default_fields(),
            k_min: 1,
            k_max: 4,
            m_max: 8,
            envelope_radius: default_envelope_radius(),
            envelope_s: default_envelope_s(),
            normalize: true,
        }
    }

    fn normalize(&self) -> bool {
        match self {
            InitialData::Modes { normalize, .. } | InitialData::Random { normalize, .. } => *normalize,
        }
    }
}

fn put(state: &mut FlowState, field: FieldChoice, k: i64, m: i64, value: Complex64) -> Result<()> {
    let grid = state.grid().clone();
    let idx = grid
        .index_of(k, m)
        .ok_or_else(|| Error::Config(format!("mode ({k}, {m}) is off the lattice")))?;
    if !grid.is_kept(idx) {
        return Err(Error::Config(format!("mode ({k}, {m}) is removed by dealiasing")));
    }
    if k == 0 && m == 0 {
        return Err(Error::Config("the (0, 0) mode must vanish".into()));
    }
    let target: &mut SpectralField = match field {
        FieldChoice::Phi => &mut state.phi,
        FieldChoice::G if k == 0 => return Err(Error::Config("G has no k = 0 modes".into())),
        FieldChoice::G => &mut state.g,
        FieldChoice::V0x if k != 0 => return Err(Error::Config("v0x lives on k = 0 only".into())),
        FieldChoice::V0x => &mut state.v0x,
    };
    if k == 0 && m < 0 {
        return target.set_real_pair(0, -m, value.conj());
    }
    target.set_real_pair(k, m, value)
}

/// Builds the initial state of a recipe at `t = 0`.
///
/// `epsilon = 0` leaves the recipe at unit size; the random recipe draws from a ChaCha8
/// stream seeded with `seed`, visiting modes in a fixed order.
pub fn initial_state(data: &InitialData, grid: Arc<Grid>, epsilon: f64, seed: u64) -> Result<FlowState> {
    let mut state = FlowState::zeros(grid.clone(), 0.0);
    match data {
        InitialData::Modes { modes, .. } => {
            if modes.is_empty() {
                return Err(Error::Config("the modes recipe needs at least one mode".into()));
            }
            for ms in modes {
                put(&mut state, ms.field, ms.k, ms.m, Complex64::new(ms.re, ms.im))?;
            }
        }
        InitialData::Random {
            fields,
            k_min,
            k_max,
            m_max,
            envelope_radius,
            envelope_s,
            ..
        } => {
            if *k_min < 0 || k_max < k_min || *m_max < 0 || fields.is_empty() {
                return Err(Error::Config("random recipe needs 0 <= k_min <= k_max, m_max >= 0 and a field".into()));
            }
            if !(*envelope_radius >= 0.0) || !(*envelope_s > 0.0) {
                return Err(Error::Config("envelope radius must be >= 0 and exponent > 0".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let de = grid.eta_spacing();
            for &f in fields {
                for k in *k_min..=*k_max {
                    for m in -*m_max..=*m_max {
                        let skip = match f {
                            FieldChoice::G => k == 0,
                            FieldChoice::V0x => k != 0,
                            FieldChoice::Phi => false,
                        };
                        if skip || (k == 0 && m <= 0) {
                            continue;
                        }
                        let env = (-envelope_radius * ((k as f64) + (m as f64 * de).abs()).powf(*envelope_s)).exp();
                        let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * env;
                        put(&mut state, f, k, m, c)?;
                    }
                }
            }
        }
    }
    let size = (state.phi.norm_sq() + state.g.norm_sq() + state.v0x.norm_sq()).sqrt();
    if size == 0.0 {
        return Err(Error::Config("the initial-data recipe produced a zero state".into()));
    }
    if epsilon > 0.0 && data.normalize() {
        let c = Complex64::new(epsilon / size, 0.0);
        state.phi.scale(c);
        state.g.scale(c);
        state.v0x.scale(c);
    }
    Ok(state)
}

/// Replaces `G` by the quasi-static value of the linear `G` equation driven by `φ`,
/// `iα³k³φ / (νp² (νp − 2k(η−kt)/p − α²k²/(νp)))`, on modes where the bracket is positive
/// and by zero elsewhere. Removes the initial layer of width `1/(νp)` from a run.
pub fn slave_g(state: &mut FlowState, nu: f64, alpha: f64) {
    let grid = state.grid().clone();
    let t = state.t;
    for i in 0..grid.len() {
        let (k, eta) = grid.mode(i);
        let value = if k == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            let kf = k as f64;
            let p = p_symbol(kf, eta, t);
            let rate = nu * p - 2.0 * kf * (eta - kf * t) / p - alpha * alpha * kf * kf / (nu * p);
            if rate > 0.0 {
                state.phi.coeffs()[i] * Complex64::new(0.0, alpha.powi(3) * kf.powi(3) / (nu * p * p * rate))
            } else {
                Complex64::new(0.0, 0.0)
            }
        };
        state.g.coeffs_mut()[i] = value;
    }
}

/// Quantities of the dominance hypothesis for the inflation experiment, all in `H^{-2}`
/// with the symbol `(1 + k² + η²)^{-1}` and `χ = 1_{|k| ≥ k₀}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Dominance {
    pub k0: i64,
    /// `‖χφ_in‖_{H^{-2}}`.
    pub chi_phi: f64,
    /// `‖φ_in‖_{H^{-2}}`.
    pub phi: f64,
    /// `‖χ∂_xG_in‖_{H^{-2}}`.
    pub chi_dx_g: f64,
}

impl Dominance {
    /// `‖χφ_in‖ ≥ max(‖χ∂_xG_in‖, c‖φ_in‖)`.
    pub fn holds(&self, c: f64) -> bool {
        self.chi_phi >= self.chi_dx_g && self.chi_phi >= c * self.phi
    }
}

pub fn dominance(state: &FlowState, k0: i64) -> Dominance {
    let grid = state.grid();
    let (mut chi_phi, mut phi, mut chi_dx_g) = (0.0, 0.0, 0.0);
    for i in 0..grid.len() {
        let (k, eta) = grid.mode(i);
        let kf = k as f64;
        let w = 1.0 / (1.0 + kf * kf + eta * eta);
        let p2 = (w * state.phi.coeffs()[i].norm()).powi(2);
        phi += p2;
        if k.abs() >= k0 {
            chi_phi += p2;
            chi_dx_g += (w * kf * state.g.coeffs()[i].norm()).powi(2);
        }
    }
    Dominance {
        k0,
        chi_phi: chi_phi.sqrt(),
        phi: phi.sqrt(),
        chi_dx_g: chi_dx_g.sqrt(),
    }
}
