//! Numerical laboratory for the viscous, non-resistive 2D MHD equations linearized
//! around Couette flow in sheared coordinates.
//!
//! Modules:
//! - [`spectral`]: Fourier lattice, spectral fields, moving-frame symbols and dealiased transforms.
//! - [`weights`]: time-dependent Fourier multipliers (λ, m_L, m, q, J, A) in log-space.
//! - [`linear`]: frequency-decoupled linear system and weighted-energy audits.
//! - [`nonlinear`]: pseudo-spectral IFRK4 stepper, diagnostics and energy-identity audit.
//! - [`echo`]: three-mode resonance model and echo chains.
//! - [`experiments`]: run configuration, orchestration and power-law fits.

pub mod echo;
pub mod error;
pub mod experiments;
pub mod linear;
pub mod nonlinear;
pub mod ode;
pub mod quad;
pub mod spectral;
pub mod weights;

pub use echo::{chain_run, three_mode_integrate, ChainResult, Coupling, EchoConfig, EchoLink};
pub use error::{Error, Result};
pub use experiments::{run_experiment, ArtifactBundle, ExperimentKind, RunConfig, Summary};
pub use linear::{linear_sweep, LinearParams, SweepConfig};
pub use nonlinear::{diagnostics, DiagnosticsConfig, DiagnosticsRecord, FlowState, Simulation, StepperConfig};
pub use spectral::{Grid, SpectralField};
pub use weights::{WeightParams, WeightTable};

pub use num_complex::Complex64;
