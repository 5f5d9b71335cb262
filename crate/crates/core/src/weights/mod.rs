//! Time-dependent Fourier multipliers evaluated in log-space.
//!
//! `A(t,k,η) = ⟨k,η⟩^N m^{-1} J e^{λ(t)(|k|+|η|)^s}` with `J = e^{8ρ|η|^{1/3}}/q + e^{8ρ|k|^{1/3}}`,
//! together with the linear weight `m_L`, the resonant-interval geometry and the
//! frequency-pair classifier.

mod classify;
mod lambda;
mod lemmas;
mod m;
mod ml;
mod multipliers;
mod params;
mod q;
mod resonance;
mod table;

pub use classify::{classify_pair, in_s_t, PairClass};
pub use lambda::{dt_lambda, lambda_at};
pub use lemmas::{lemma_a3_bound, useest_i_ratio, useest_ii_holds, useest_iii_holds, A3Case};
pub use m::{dt_log_m, j_cap, log_m, log_m_between};
pub use ml::{dt_log_ml, log_ml};
pub use multipliers::{japanese, log_a, log_a_parts, log_at, log_j, log_jt, logaddexp};
pub use params::WeightParams;
pub use q::{dq_ratio, log_q, q_breakpoints};
pub use resonance::{resonance_layout, resonant_k, Interval, ResonanceLayout};
pub use table::{WeightEntry, WeightTable};
