//! Pseudo-spectral solver for the nonlinear system in moving-frame variables.

mod diagnostics;
mod identity;
mod rhs;
mod state;
mod stepper;

pub use diagnostics::{diagnostics, field_norms, weighted_energy, DiagnosticsConfig, DiagnosticsRecord, FieldNorms};
pub use identity::{energy_identity_residual, frozen_identity_residual, ResidualSeries};
pub use rhs::{nonlinear_rhs, quadratic_terms, QuadraticTerms};
pub use state::{from_good_unknowns, to_good_unknowns, FlowState};
pub use stepper::{step, Scheme, Simulation, StepperConfig, Unknowns};
