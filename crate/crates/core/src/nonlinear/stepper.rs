use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;
use std::sync::Arc;

use super::rhs::{with_zero_mode_vorticity, Quadratic};
use super::state::{g_from_w, to_good_unknowns, w_from_g, FlowState};
use crate::error::{Error, Result};
use crate::linear::{p_integral, split_rhs, LinearParams};
use crate::spectral::{p_symbol, FieldLabel, Grid, SpectralField};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
/// Extent of the RK4 stability region along the imaginary axis.
const RK4_IMAG_BOUND: f64 = 2.0 * SQRT_2;

/// Time-stepping scheme.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Lawson integrating-factor RK4 with the exact viscous factor.
    #[default]
    Ifrk4,
}

fn default_cfl_safety() -> f64 {
    0.8
}

fn default_true() -> bool {
    true
}

/// Step size, scheme and physical parameters of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepperConfig {
    pub dt: f64,
    #[serde(default)]
    pub scheme: Scheme,
    /// Upper bound for the CFL number (see [`Simulation::cfl_number`]).
    #[serde(default = "default_cfl_safety")]
    pub cfl_safety: f64,
    pub nu: f64,
    pub alpha: f64,
    /// When false, only the linear terms are advanced.
    #[serde(default = "default_true")]
    pub nonlinear: bool,
}

impl StepperConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::Config(format!("cfl_safety = {} must lie in (0, 1]", self.cfl_safety)));
        }
        if !(self.nu.is_finite() && self.nu >= 0.0) {
            return Err(Error::Config(format!("nu = {} must be nonnegative", self.nu)));
        }
        if !self.alpha.is_finite() {
            return Err(Error::Config("alpha must be finite".into()));
        }
        Ok(())
    }
}

/// Variables advanced by the stepper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Unknowns {
    /// `(G, φ, v₀ˣ)`, used when `ν > 0`.
    Good,
    /// `(w, φ, v₀ˣ)`, used when `ν = 0`.
    Vorticity,
}

#[derive(Debug, Clone)]
struct Vars {
    a: Vec<Complex64>,
    phi: Vec<Complex64>,
    v0: Vec<Complex64>,
}

impl Vars {
    fn zeros(n: usize) -> Self {
        Self {
            a: vec![ZERO; n],
            phi: vec![ZERO; n],
            v0: vec![ZERO; n],
        }
    }
}

/// Per-mode integrating factors over one sub-interval.
struct Factors {
    a: Vec<f64>,
    v0: Vec<f64>,
}

/// `out = fa·x + h·fb·y` componentwise, with `φ` carrying unit factors.
fn combine(out: &mut Vars, fx: Option<&Factors>, x: &Vars, h: f64, fy: Option<&Factors>, y: &Vars) {
    let f = |fs: Option<&Factors>, i: usize, is_a: bool| match fs {
        None => 1.0,
        Some(fs) => {
            if is_a {
                fs.a[i]
            } else {
                fs.v0[i]
            }
        }
    };
    for i in 0..out.a.len() {
        out.a[i] = f(fx, i, true) * x.a[i] + h * f(fy, i, true) * y.a[i];
        out.phi[i] = x.phi[i] + h * y.phi[i];
        out.v0[i] = f(fx, i, false) * x.v0[i] + h * f(fy, i, false) * y.v0[i];
    }
}

/// Pseudo-spectral integrator for the nonlinear system.
///
/// For `ν > 0` the state is advanced as `(G, φ, v₀ˣ)`: the factor `exp(−ν∫p)` is exact
/// on `G`, and `e^{−νη²δ}` on `v₀ˣ`. For `ν = 0` the state is advanced as `(w, φ, v₀ˣ)`
/// with plain RK4. Both share the quadratic terms of [`super::nonlinear_rhs`].
#[derive(Debug)]
pub struct Simulation {
    cfg: StepperConfig,
    grid: Arc<Grid>,
    form: Unknowns,
    t: f64,
    vars: Vars,
    quad: Quadratic,
    steps: u64,
    speeds: [f64; 4],
}

impl Simulation {
    /// Starts from a `(G, φ, v₀ˣ)` state; requires `ν > 0`.
    pub fn new(state: FlowState, cfg: StepperConfig) -> Result<Self> {
        cfg.validate()?;
        if cfg.nu == 0.0 {
            return Err(Error::Domain(
                "a (G, phi) state cannot be advanced at nu = 0; start from vorticity".into(),
            ));
        }
        for (f, name) in [(&state.phi, "phi"), (&state.g, "G"), (&state.v0x, "v0x")] {
            if !f.is_dealiased() {
                return Err(Error::Contract(format!("{name} is not dealiased")));
            }
        }
        let grid = state.grid().clone();
        let vars = Vars {
            a: state.g.coeffs().to_vec(),
            phi: state.phi.coeffs().to_vec(),
            v0: state.v0x.coeffs().to_vec(),
        };
        Ok(Self::assemble(cfg, grid, Unknowns::Good, state.t, vars))
    }

    /// Starts from `(w, φ, v₀ˣ)`; the `k = 0` column of `w` is ignored in favour of `v₀ˣ`.
    pub fn from_vorticity(
        w: &SpectralField,
        phi: &SpectralField,
        v0x: &SpectralField,
        t: f64,
        cfg: StepperConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        if cfg.nu > 0.0 {
            let wne = w.project(crate::spectral::ModePart::NonzeroModes);
            let state = to_good_unknowns(&wne, phi, v0x, t, cfg.nu, cfg.alpha)?;
            return Self::new(state, cfg);
        }
        for (f, name) in [(w, "w"), (phi, "phi"), (v0x, "v0x")] {
            if !f.is_dealiased() {
                return Err(Error::Contract(format!("{name} is not dealiased")));
            }
        }
        if !w.same_grid(phi) || !w.same_grid(v0x) {
            return Err(Error::Config("fields must share one grid".into()));
        }
        let grid = w.grid().clone();
        let ny = grid.n_y();
        let mut a = w.coeffs().to_vec();
        a[..ny].fill(ZERO);
        let mut v0 = v0x.coeffs().to_vec();
        v0[ny..].fill(ZERO);
        let vars = Vars {
            a,
            phi: phi.coeffs().to_vec(),
            v0,
        };
        Ok(Self::assemble(cfg, grid, Unknowns::Vorticity, t, vars))
    }

    fn assemble(cfg: StepperConfig, grid: Arc<Grid>, form: Unknowns, t: f64, vars: Vars) -> Self {
        let quad = Quadratic::new(grid.clone());
        Self {
            cfg,
            grid,
            form,
            t,
            vars,
            quad,
            steps: 0,
            speeds: [0.0; 4],
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn unknowns(&self) -> Unknowns {
        self.form
    }

    pub fn config(&self) -> &StepperConfig {
        &self.cfg
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Current state as `(G, φ, v₀ˣ)`; at `ν = 0`, `G = α∂_xΔ_t^{-1}φ_≠`.
    pub fn flow_state(&self) -> FlowState {
        let grid = self.grid.clone();
        let ny = grid.n_y();
        let g = match self.form {
            Unknowns::Good => self.vars.a.clone(),
            Unknowns::Vorticity => {
                let mut g = vec![ZERO; grid.len()];
                for (i, out) in g.iter_mut().enumerate().skip(ny) {
                    let (k, eta) = grid.mode(i);
                    *out = g_from_w(k, eta, self.t, self.vars.a[i], self.vars.phi[i], self.cfg.nu, self.cfg.alpha);
                }
                g
            }
        };
        FlowState {
            t: self.t,
            phi: field(&grid, self.vars.phi.clone(), FieldLabel::Phi),
            g: field(&grid, g, FieldLabel::G),
            v0x: field(&grid, self.vars.v0.clone(), FieldLabel::V0x),
        }
    }

    /// Current state as `(w, φ, v₀ˣ)` with `w₀ = −∂_y v₀ˣ`.
    pub fn vorticity(&self) -> (SpectralField, SpectralField, SpectralField) {
        let grid = self.grid.clone();
        let ny = grid.n_y();
        let mut w = match self.form {
            Unknowns::Vorticity => self.vars.a.clone(),
            Unknowns::Good => {
                let mut w = vec![ZERO; grid.len()];
                for (i, out) in w.iter_mut().enumerate().skip(ny) {
                    let (k, eta) = grid.mode(i);
                    *out = w_from_g(k, eta, self.t, self.vars.a[i], self.vars.phi[i], self.cfg.nu, self.cfg.alpha);
                }
                w
            }
        };
        w = with_zero_mode_vorticity(&grid, &w, &self.vars.v0);
        (
            field(&grid, w, FieldLabel::W),
            field(&grid, self.vars.phi.clone(), FieldLabel::Phi),
            field(&grid, self.vars.v0.clone(), FieldLabel::V0x),
        )
    }

    /// Largest explicit rate: transport `(|v^x|+|b^x|)·k_max + (|v^y|+|b^y|)·η_max` plus the
    /// linear coupling rate of the advanced variables.
    fn explicit_rate(&self, speeds: [f64; 4]) -> f64 {
        let kmax = self.grid.k_keep() as f64;
        let emax = self.grid.eta_keep();
        let transport = if self.cfg.nonlinear {
            (speeds[0] + speeds[2]) * kmax + (speeds[1] + speeds[3]) * emax
        } else {
            0.0
        };
        let linear = match self.form {
            Unknowns::Good => 1.0 + 2.0 * self.cfg.alpha * self.cfg.alpha / self.cfg.nu,
            Unknowns::Vorticity => self.cfg.alpha.abs() * kmax,
        };
        transport + linear
    }

    /// CFL number `dt·rate/(2√2)` for the most recent right-hand-side evaluation.
    pub fn cfl_number(&self) -> f64 {
        self.cfg.dt * self.explicit_rate(self.speeds) / RK4_IMAG_BOUND
    }

    fn factors(&self, t0: f64, t1: f64) -> Factors {
        let n = self.grid.len();
        let ny = self.grid.n_y();
        let nu = self.cfg.nu;
        let mut a = vec![1.0; n];
        let mut v0 = vec![1.0; n];
        if nu > 0.0 {
            for (i, f) in a.iter_mut().enumerate().skip(ny) {
                let (k, eta) = self.grid.mode(i);
                *f = (-nu * p_integral(k, eta, t0, t1)).exp();
            }
            for (i, f) in v0.iter_mut().enumerate().take(ny) {
                let eta = self.grid.eta_of(i);
                *f = (-nu * eta * eta * (t1 - t0)).exp();
            }
        }
        Factors { a, v0 }
    }

    /// Right-hand side without the integrating-factor terms.
    fn explicit(&mut self, t: f64, y: &Vars, out: &mut Vars) -> [f64; 4] {
        let grid = self.grid.clone();
        let n = grid.len();
        let ny = grid.n_y();
        let (nu, alpha) = (self.cfg.nu, self.cfg.alpha);
        let w: Vec<Complex64> = match self.form {
            Unknowns::Vorticity => with_zero_mode_vorticity(&grid, &y.a, &y.v0),
            Unknowns::Good => {
                let mut w = vec![ZERO; n];
                for i in ny..n {
                    let (k, eta) = grid.mode(i);
                    w[i] = w_from_g(k, eta, t, y.a[i], y.phi[i], nu, alpha);
                }
                with_zero_mode_vorticity(&grid, &w, &y.v0)
            }
        };
        let terms = if self.cfg.nonlinear {
            Some(self.quad.eval(&w, &y.phi, &y.v0, t))
        } else {
            None
        };
        let lp = LinearParams { nu, alpha };
        for i in 0..n {
            out.a[i] = ZERO;
            out.phi[i] = ZERO;
            out.v0[i] = ZERO;
            if !grid.is_kept(i) {
                continue;
            }
            let (nw, nphi, flux) = match &terms {
                Some(q) => (q.n_w[i], q.n_phi[i], q.flux[i]),
                None => (ZERO, ZERO, ZERO),
            };
            if i < ny {
                out.phi[i] = nphi;
                out.v0[i] = flux;
                continue;
            }
            let (k, eta) = grid.mode(i);
            let kf = k as f64;
            let p = p_symbol(kf, eta, t);
            match self.form {
                Unknowns::Good => {
                    let (_, dg, dphi) = split_rhs(k, eta, t, y.a[i], y.phi[i], &lp);
                    out.a[i] = dg - (nu * nw + Complex64::new(0.0, alpha * kf) * nphi) / p;
                    out.phi[i] = dphi + nphi;
                }
                Unknowns::Vorticity => {
                    out.a[i] = Complex64::new(0.0, -alpha * kf * p) * y.phi[i] + nw;
                    out.phi[i] = Complex64::new(0.0, -alpha * kf / p) * w[i] + nphi;
                }
            }
        }
        terms.map(|q| q.speeds).unwrap_or([0.0; 4])
    }

    /// Replaces the base step, for instance after a CFL rejection.
    pub fn set_dt(&mut self, dt: f64) -> Result<()> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Config(format!("dt = {dt} must be positive")));
        }
        self.cfg.dt = dt;
        Ok(())
    }

    /// One step of length `dt` from the configuration.
    pub fn step(&mut self) -> Result<()> {
        self.step_by(self.cfg.dt)
    }

    /// One IFRK4 step of length `h`. A CFL violation leaves the state untouched.
    pub fn step_by(&mut self, h: f64) -> Result<()> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Config(format!("step length {h} must be positive")));
        }
        let n = self.grid.len();
        let t = self.t;
        let y = self.vars.clone();
        let mut k1 = Vars::zeros(n);
        let speeds = self.explicit(t, &y, &mut k1);
        self.speeds = speeds;
        let rate = self.explicit_rate(speeds);
        let cfl = h * rate / RK4_IMAG_BOUND;
        if cfl > self.cfg.cfl_safety {
            return Err(Error::Cfl {
                cfl,
                limit: self.cfg.cfl_safety,
                suggested_dt: 0.9 * self.cfg.cfl_safety * RK4_IMAG_BOUND / rate,
            });
        }
        let e1 = self.factors(t, t + 0.5 * h);
        let e2 = self.factors(t + 0.5 * h, t + h);
        let e12 = Factors {
            a: e1.a.iter().zip(&e2.a).map(|(x, y)| x * y).collect(),
            v0: e1.v0.iter().zip(&e2.v0).map(|(x, y)| x * y).collect(),
        };
        let mut u = Vars::zeros(n);
        let mut k2 = Vars::zeros(n);
        let mut k3 = Vars::zeros(n);
        let mut k4 = Vars::zeros(n);

        combine(&mut u, None, &y, 0.5 * h, None, &k1);
        let tmp = u.clone();
        combine(&mut u, Some(&e1), &tmp, 0.0, None, &tmp);
        self.explicit(t + 0.5 * h, &u, &mut k2);

        combine(&mut u, Some(&e1), &y, 0.5 * h, None, &k2);
        self.explicit(t + 0.5 * h, &u, &mut k3);

        combine(&mut u, Some(&e12), &y, h, Some(&e2), &k3);
        self.explicit(t + h, &u, &mut k4);

        let mut next = Vars::zeros(n);
        for i in 0..n {
            let (fa, fv) = (e12.a[i], e12.v0[i]);
            let (ga, gv) = (e2.a[i], e2.v0[i]);
            next.a[i] = fa * y.a[i] + h / 6.0 * (fa * k1.a[i] + 2.0 * ga * (k2.a[i] + k3.a[i]) + k4.a[i]);
            next.phi[i] = y.phi[i] + h / 6.0 * (k1.phi[i] + 2.0 * (k2.phi[i] + k3.phi[i]) + k4.phi[i]);
            next.v0[i] = fv * y.v0[i] + h / 6.0 * (fv * k1.v0[i] + 2.0 * gv * (k2.v0[i] + k3.v0[i]) + k4.v0[i]);
        }
        self.vars = next;
        self.t = t + h;
        self.steps += 1;
        Ok(())
    }

    /// Steps with `dt` until `t_end`, shortening the final step to land on it.
    pub fn advance_to(&mut self, t_end: f64) -> Result<()> {
        let dt = self.cfg.dt;
        while self.t < t_end - 1e-12 * dt.max(t_end.abs()) {
            let remaining = t_end - self.t;
            let h = if remaining < dt * (1.0 + 1e-9) { remaining } else { dt };
            self.step_by(h)?;
            if (self.t - t_end).abs() <= 1e-9 * dt {
                self.t = t_end;
            }
        }
        Ok(())
    }
}

fn field(grid: &Arc<Grid>, coeffs: Vec<Complex64>, label: FieldLabel) -> SpectralField {
    SpectralField::from_coeffs(grid.clone(), coeffs, label).expect("coefficient count matches grid")
}

/// Advances `state` by one step of `cfg.dt`.
pub fn step(state: &FlowState, cfg: &StepperConfig) -> Result<FlowState> {
    let mut sim = Simulation::new(state.clone(), cfg.clone())?;
    sim.step()?;
    Ok(sim.flow_state())
}
