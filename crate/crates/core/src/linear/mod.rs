//! Frequency-decoupled linear system for `(G, φ)` and its weighted-energy audit.
//!
//! Per mode `(k, η)` with `p = k² + (η − kt)²`:
//!
//! ```text
//! G' = [−νp + 2k(η−kt)/p + α²k²/(νp)] G + iα³k³/(νp²) φ
//! φ' = (iαk/ν) G − α²k²/(νp) φ
//! ```
//!
//! Integration uses Dormand–Prince 5(4) in Lawson form: the `−νp G` term is carried by
//! its exact factor `exp(−ν∫p)`, so the step size is not bound by the `νk²t²` stiffness.

mod field;
mod report;
mod rhs;
mod sweep;
mod trajectory;

pub use field::linear_field_solution;
pub use report::{mode_energy_report, ModeEnergyReport, ModeEnergySample};
pub(crate) use rhs::split_rhs;
pub use rhs::{linear_rhs_mode, p_integral, LinearParams, ModeState};
pub use sweep::{linear_sweep, SweepConfig, SweepRow, SweepSummary};
pub use trajectory::{integrate_mode, integrate_mode_final, EnergyWeight, ModeSample, ModeTrajectory};
