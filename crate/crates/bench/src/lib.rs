//! Criterion benchmark support crate.
