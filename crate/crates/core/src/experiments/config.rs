use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use super::initial::{FieldChoice, InitialData};
use crate::echo::{Coupling, EchoConfig};
use crate::error::{Error, Result};
use crate::linear::SweepConfig;
use crate::spectral::Grid;
use crate::weights::WeightParams;

/// Experiment selected by the CLI subcommand or the `kind` key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    LinearSweep,
    Simulate,
    Stability,
    Inflation,
    Echo,
    WeightsAudit,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::LinearSweep,
        ExperimentKind::Simulate,
        ExperimentKind::Stability,
        ExperimentKind::Inflation,
        ExperimentKind::Echo,
        ExperimentKind::WeightsAudit,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::LinearSweep => "linear-sweep",
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::Stability => "stability",
            ExperimentKind::Inflation => "inflation",
            ExperimentKind::Echo => "echo",
            ExperimentKind::WeightsAudit => "weights-audit",
        }
    }

    /// Kinds that time-step the nonlinear system.
    pub fn is_flow(&self) -> bool {
        matches!(self, ExperimentKind::Simulate | ExperimentKind::Stability | ExperimentKind::Inflation)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment kind '{s}'")))
    }
}

/// Periodic lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n_x: usize,
    pub n_y: usize,
    /// Vertical period; `η` is a multiple of `2π/l_y`.
    pub l_y: f64,
    /// Fraction of each axis kept by dealiasing.
    pub dealias: f64,
}

impl GridSpec {
    pub fn new(n_x: usize, n_y: usize) -> Self {
        Self {
            n_x,
            n_y,
            l_y: 2.0 * PI,
            dealias: 2.0 / 3.0,
        }
    }

    pub fn build(&self) -> Result<Grid> {
        Grid::new(self.n_x, self.n_y, self.l_y, self.dealias)
    }
}

/// Final time, either absolute or tied to the coupling size `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum TimePolicy {
    /// A fixed time.
    Absolute(f64),
    /// `c · ε^{-2/3}`.
    EpsTwoThirds(f64),
    /// `c · ε^{-1/2}`.
    EpsHalf(f64),
}

impl TimePolicy {
    pub fn resolve(&self, epsilon: f64) -> Result<f64> {
        let t = match *self {
            TimePolicy::Absolute(t) => t,
            TimePolicy::EpsTwoThirds(c) => c * epsilon.powf(-2.0 / 3.0),
            TimePolicy::EpsHalf(c) => c * epsilon.powf(-0.5),
        };
        if t.is_finite() && t > 0.0 {
            Ok(t)
        } else {
            Err(Error::Config(format!("time policy {self:?} with epsilon = {epsilon} gives t = {t}")))
        }
    }
}

/// Time stepping and sampling of flow runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub t_end: TimePolicy,
    /// Base step; shortened to land on sample times and after CFL rejections.
    pub dt: f64,
    /// Diagnostics stride.
    pub sample_dt: f64,
    pub cfl_safety: f64,
}

/// Options of the energy-identity audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateOptions {
    /// Also evaluate the residual at twice the sampling stride.
    pub refine: bool,
    /// Write binary snapshots of `φ`, `G`, `v₀ˣ` at this stride.
    pub snapshot_every: Option<f64>,
}

/// Options of the inflation experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InflationOptions {
    /// Start of the fit window.
    pub fit_start: f64,
    /// End of the fit window.
    pub fit_end: TimePolicy,
    /// Further cutoffs reported for the X-seminorm discrepancy.
    pub k0_scan: Vec<i64>,
    /// Constant `c` in `‖χφ_in‖ ≥ c‖φ_in‖` enforced before the run.
    pub dominance_c: f64,
}

/// Options of the echo-chain experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EchoOptions {
    pub etas: Vec<f64>,
    pub coupling: Coupling,
    pub window: f64,
    pub rtol: f64,
    /// First link; `⌊η^{1/3}⌋` when absent.
    pub k_start: Option<u32>,
}

impl EchoOptions {
    /// Chain parameters for one `η`.
    pub fn chain_config(&self, eta: f64) -> EchoConfig {
        let mut c = EchoConfig::new(eta, 1, self.coupling);
        c.window = self.window;
        c.rtol = self.rtol;
        c.k_start = self.k_start.unwrap_or_else(|| c.k_max());
        c
    }
}

/// Options of the weight audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditOptions {
    pub etas: Vec<f64>,
    pub k_min: i64,
    pub k_max: i64,
    pub t_min: f64,
    pub t_max: f64,
    pub t_count: usize,
}

/// Pass/fail thresholds. Only the entries relevant to the run's kind are evaluated; an
/// absent entry is not checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Assertions {
    /// linear-sweep: largest `(E_{i+1} − E_i)/E(0)`.
    pub max_energy_increase: Option<f64>,
    /// simulate: `max |r| / max E` at the sampling stride.
    pub identity_relative: Option<f64>,
    /// simulate: residual at stride `2h` over residual at `h`.
    pub refinement_gain: Option<f64>,
    /// stability: `max E(t)/E(0)`.
    pub max_energy_ratio: Option<f64>,
    /// inflation: admissible range of the `‖j‖` and `⟨t⟩‖b‖` exponents.
    pub exponent_range: Option<[f64; 2]>,
    /// inflation: `max ‖φ − φ_lin‖_X / ‖φ_lin‖_X`.
    pub baseline_ratio: Option<f64>,
    /// echo: every link's `gain_down / predicted` lies in `[1/f, f]`.
    pub gain_factor: Option<f64>,
    /// echo: slope of log-growth against `η^{1/3}`.
    pub slope_range: Option<[f64; 2]>,
    pub min_r_squared: Option<f64>,
    /// weights-audit: largest jump of `log q` across its breakpoints.
    pub q_jump: Option<f64>,
    /// Names of assertions to leave unchecked.
    pub skip: Vec<String>,
}

impl Default for Assertions {
    fn default() -> Self {
        Self {
            max_energy_increase: Some(1e-6),
            identity_relative: Some(1e-4),
            refinement_gain: Some(3.0),
            max_energy_ratio: Some(4.0),
            exponent_range: Some([1.8, 2.2]),
            baseline_ratio: Some(0.1),
            gain_factor: Some(2.0),
            slope_range: Some([0.25, 1.0]),
            min_r_squared: Some(0.95),
            q_jump: Some(1e-8),
            skip: Vec::new(),
        }
    }
}

/// Complete description of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    /// Size of the initial data; `0` requests a linear inflation run at unit size.
    pub epsilon: f64,
    pub nu: f64,
    pub alpha: f64,
    pub nonlinear: bool,
    /// Cutoff of `χ = 1_{|k| ≥ k₀}`.
    pub k0: i64,
    pub grid: GridSpec,
    pub time: TimeSpec,
    pub weights: WeightParams,
    pub initial: InitialData,
    /// Start `G` at its quasi-static value driven by `φ` (see [`super::slave_g`]).
    pub slaved_g: bool,
    pub output_dir: Option<PathBuf>,
    pub simulate: SimulateOptions,
    pub inflation: InflationOptions,
    pub sweep: SweepConfig,
    pub echo: EchoOptions,
    pub audit: AuditOptions,
    pub assertions: Assertions,
}

impl RunConfig {
    /// Defaults of `kind`, sized for the desk-scale reproductions.
    pub fn defaults(kind: ExperimentKind) -> Self {
        let mut cfg = RunConfig {
            kind,
            seed: 1,
            epsilon: 1e-3,
            nu: 1.0,
            alpha: 1.0,
            nonlinear: true,
            k0: 4,
            grid: GridSpec::new(64, 128),
            time: TimeSpec {
                t_end: TimePolicy::Absolute(20.0),
                dt: 0.025,
                sample_dt: 0.1,
                cfl_safety: 0.8,
            },
            weights: WeightParams::default(),
            initial: InitialData::default_random(),
            slaved_g: false,
            output_dir: None,
            simulate: SimulateOptions {
                refine: true,
                snapshot_every: None,
            },
            inflation: InflationOptions {
                fit_start: 5.0,
                fit_end: TimePolicy::EpsTwoThirds(0.5),
                k0_scan: vec![2, 3, 4],
                dominance_c: 0.5,
            },
            sweep: SweepConfig::default(),
            echo: EchoOptions {
                etas: vec![1e3, 1e4, 1e5],
                coupling: Coupling::RegimeBoundary { delta: 1.0 },
                window: 8.0,
                rtol: 1e-9,
                k_start: None,
            },
            audit: AuditOptions {
                etas: vec![500.0],
                k_min: 1,
                k_max: 10,
                t_min: 0.0,
                t_max: 600.0,
                t_count: 1201,
            },
            assertions: Assertions::default(),
        };
        match kind {
            ExperimentKind::Simulate => {
                cfg.time.sample_dt = 0.05;
                cfg.time.dt = 0.00625;
                cfg.initial = InitialData::Random {
                    fields: vec![FieldChoice::Phi],
                    k_min: 1,
                    k_max: 4,
                    m_max: 8,
                    envelope_radius: 0.5,
                    envelope_s: 0.5,
                    normalize: true,
                };
                cfg.slaved_g = true;
            }
            ExperimentKind::Stability => {
                cfg.grid = GridSpec::new(128, 256);
                cfg.time.t_end = TimePolicy::EpsHalf(0.1);
                cfg.time.dt = 0.01;
            }
            ExperimentKind::Inflation => {
                cfg.epsilon = 1e-4;
                cfg.grid = GridSpec::new(128, 256);
                cfg.time.t_end = TimePolicy::EpsTwoThirds(0.5);
                cfg.time.dt = 0.05;
                cfg.initial = InitialData::Random {
                    fields: vec![FieldChoice::Phi],
                    k_min: 5,
                    k_max: 5,
                    m_max: 4,
                    envelope_radius: 0.5,
                    envelope_s: 0.5,
                    normalize: true,
                };
            }
            _ => {}
        }
        cfg
    }

    /// Parses TOML on top of the defaults of the kind given by `kind` or by the `kind` key.
    pub fn from_toml_str(kind: Option<ExperimentKind>, text: &str) -> Result<Self> {
        let user: toml::Table = toml::from_str(text)?;
        let file_kind = match user.get("kind") {
            Some(toml::Value::String(s)) => Some(s.parse::<ExperimentKind>()?),
            Some(_) => return Err(Error::Config("'kind' must be a string".into())),
            None => None,
        };
        let kind = match (kind, file_kind) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::Config(format!("config is for '{b}' but '{a}' was requested")));
            }
            (Some(a), _) => a,
            (None, Some(b)) => b,
            (None, None) => return Err(Error::Config("no experiment kind given".into())),
        };
        let mut base = toml::Table::try_from(RunConfig::defaults(kind)).map_err(|e| Error::Config(e.to_string()))?;
        merge(&mut base, user);
        let cfg: RunConfig = toml::Value::Table(base).try_into()?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Resolved final time of flow runs.
    pub fn t_end(&self) -> Result<f64> {
        self.time.t_end.resolve(self.epsilon)
    }

    /// Whether the nonlinear terms are advanced (`ε = 0` is a linear run).
    pub fn effective_nonlinear(&self) -> bool {
        self.nonlinear && self.epsilon > 0.0
    }

    /// Checks every precondition that can be checked without computing.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.kind.is_flow() {
            let linear_inflation = self.kind == ExperimentKind::Inflation && self.epsilon == 0.0;
            if !linear_inflation && !(self.epsilon > 0.0 && self.epsilon <= 0.1) {
                return bad(format!("epsilon = {} must lie in (0, 0.1]", self.epsilon));
            }
            if !(self.nu > 0.0 && self.nu.is_finite()) {
                return bad(format!("flow runs need nu > 0, got {}", self.nu));
            }
            if !self.alpha.is_finite() {
                return bad("alpha must be finite".into());
            }
            self.grid.build()?;
            self.weights.validate()?;
            let t_end = if linear_inflation {
                match self.time.t_end {
                    TimePolicy::Absolute(t) if t > 0.0 => t,
                    _ => return bad("a linear run (epsilon = 0) needs an absolute t_end".into()),
                }
            } else {
                self.t_end()?
            };
            let ts = &self.time;
            if !(ts.dt > 0.0 && ts.dt.is_finite()) || !(ts.sample_dt > 0.0 && ts.sample_dt.is_finite()) {
                return bad("dt and sample_dt must be positive".into());
            }
            if !(ts.cfl_safety > 0.0 && ts.cfl_safety <= 1.0) {
                return bad(format!("cfl_safety = {} must lie in (0, 1]", ts.cfl_safety));
            }
            if ts.sample_dt > t_end {
                return bad(format!("sample_dt = {} exceeds t_end = {t_end}", ts.sample_dt));
            }
            if t_end / ts.sample_dt > 1e6 {
                return bad("more than 10^6 samples requested".into());
            }
            if self.k0 < 1 {
                return bad(format!("k0 = {} must be positive", self.k0));
            }
            if self.kind == ExperimentKind::Inflation {
                let io = &self.inflation;
                if !(io.fit_start > 0.0) || io.k0_scan.iter().any(|k| *k < 1) || !(io.dominance_c > 0.0 && io.dominance_c <= 1.0) {
                    return bad("inflation needs fit_start > 0, positive k0_scan and dominance_c in (0, 1]".into());
                }
                let fit_end = if linear_inflation {
                    match io.fit_end {
                        TimePolicy::Absolute(t) => t,
                        _ => t_end,
                    }
                } else {
                    io.fit_end.resolve(self.epsilon)?
                };
                if fit_end <= io.fit_start || fit_end > t_end * (1.0 + 1e-12) {
                    return bad(format!("fit window [{}, {fit_end}] must lie inside (0, {t_end}]", io.fit_start));
                }
            }
            if let Some(s) = self.simulate.snapshot_every {
                if !(s > 0.0) {
                    return bad("snapshot_every must be positive".into());
                }
            }
        }
        match self.kind {
            ExperimentKind::LinearSweep => {
                if !(self.nu > 0.0) {
                    return bad("the linear sweep needs nu > 0".into());
                }
                self.weights.validate()?;
            }
            ExperimentKind::Echo => {
                if self.echo.etas.len() < 2 {
                    return bad("the echo experiment needs at least two eta values".into());
                }
                for &eta in &self.echo.etas {
                    let c = self.echo.chain_config(eta);
                    c.validate()?;
                    if c.k_start < 2 {
                        return bad(format!("eta = {eta} leaves fewer than two links"));
                    }
                }
            }
            ExperimentKind::WeightsAudit => {
                let a = &self.audit;
                if a.etas.is_empty() || a.k_min > a.k_max || a.t_count < 2 || !(a.t_max > a.t_min && a.t_min >= 0.0) {
                    return bad("malformed weight audit sweep".into());
                }
                self.weights.validate()?;
            }
            _ => {}
        }
        Ok(())
    }
}

fn merge(base: &mut toml::Table, user: toml::Table) {
    for (key, value) in user {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(u)) if !is_tagged(&u) => merge(b, u),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

/// Tagged or single-key enum tables replace the default instead of merging into it.
fn is_tagged(t: &toml::Table) -> bool {
    t.contains_key("recipe")
        || t.contains_key("kind")
        || (t.len() == 1 && t.keys().all(|k| matches!(k.as_str(), "absolute" | "eps-two-thirds" | "eps-half")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        for kind in ExperimentKind::ALL {
            let cfg = RunConfig::defaults(kind);
            cfg.validate().unwrap();
            let text = cfg.to_toml_string().unwrap();
            let back = RunConfig::from_toml_str(Some(kind), &text).unwrap();
            assert_eq!(back, cfg, "{kind}");
        }
    }

    #[test]
    fn partial_file_overrides_defaults() {
        let cfg = RunConfig::from_toml_str(
            None,
            r#"
            kind = "stability"
            epsilon = 1e-2
            [grid]
            n_x = 32
            n_y = 64
            [time]
            t_end = { absolute = 1.5 }
            "#,
        )
        .unwrap();
        assert_eq!(cfg.kind, ExperimentKind::Stability);
        assert_eq!((cfg.grid.n_x, cfg.grid.n_y), (32, 64));
        assert_eq!(cfg.grid.dealias, 2.0 / 3.0);
        assert_eq!(cfg.t_end().unwrap(), 1.5);
        assert_eq!(cfg.time.dt, 0.01);
    }

    #[test]
    fn time_policies() {
        assert!((TimePolicy::EpsHalf(0.1).resolve(1e-3).unwrap() - 3.1622776601683795).abs() < 1e-12);
        assert!((TimePolicy::EpsTwoThirds(0.5).resolve(1e-3).unwrap() - 50.0).abs() < 1e-9);
        assert!(TimePolicy::EpsHalf(1.0).resolve(0.0).is_err());
    }

    #[test]
    fn rejects_bad_configs() {
        let check = |kind: Option<ExperimentKind>, text: &str| RunConfig::from_toml_str(kind, text).is_err();
        assert!(check(Some(ExperimentKind::Stability), "epsilon = 0.5"));
        assert!(check(Some(ExperimentKind::Stability), "epsilon = 0.0"));
        assert!(check(Some(ExperimentKind::Stability), "bogus = 1"));
        assert!(check(Some(ExperimentKind::Echo), "kind = \"stability\""));
        assert!(check(None, "seed = 3"));
        assert!(check(Some(ExperimentKind::Simulate), "nu = 0.0"));
        assert!(check(Some(ExperimentKind::Inflation), "[inflation]\nfit_start = 300.0"));
        assert!(check(Some(ExperimentKind::Inflation), "epsilon = 0.0"));
        assert!(!check(Some(ExperimentKind::Inflation), "epsilon = 0.0\n[time]\nt_end = { absolute = 20.0 }\n[inflation]\nfit_end = { absolute = 20.0 }"));
        assert!(check(Some(ExperimentKind::Echo), "[echo]\netas = [1e3]"));
    }

    #[test]
    fn kind_names_parse() {
        for kind in ExperimentKind::ALL {
            assert_eq!(kind.name().parse::<ExperimentKind>().unwrap(), kind);
        }
        assert!("nope".parse::<ExperimentKind>().is_err());
    }
}
