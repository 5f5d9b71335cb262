use thiserror::Error;

/// Errors raised by the solver, weight and experiment layers.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid grid, parameter or run configuration.
    #[error("configuration error: {0}")]
    Config(String),
    /// A symbol or map evaluated outside its domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// An input violates an operation contract.
    #[error("contract violation: {0}")]
    Contract(String),
    /// Time integration could not proceed.
    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },
    /// Step rejected by the CFL guard.
    #[error("CFL violation: number {cfl:.3} exceeds {limit:.3}; suggested dt = {suggested_dt:.3e}")]
    Cfl {
        cfl: f64,
        limit: f64,
        suggested_dt: f64,
    },
    /// Power-law fit could not be computed.
    #[error("fit error: {0}")]
    Fit(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
