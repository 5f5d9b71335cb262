use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

use super::lambda::{dt_lambda, lambda_at};
use super::m::{dt_log_m, log_m, log_m_between};
use super::ml::{dt_log_ml, log_ml};
use super::multipliers::log_a_parts;
use super::params::WeightParams;
use super::q::{dq_ratio, log_q};
use crate::error::Result;
use crate::spectral::Grid;

/// Cached weights of one grid mode at the table time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightEntry {
    pub log_ml: f64,
    pub log_m: f64,
    pub log_q: f64,
    pub log_j: f64,
    pub log_jt: f64,
    pub log_a: f64,
    pub log_at: f64,
    /// `∂_t m / m`.
    pub dm_ratio: f64,
    /// `∂_t q / q`.
    pub dq_ratio: f64,
    /// `∂_t m_L / m_L`.
    pub dml_ratio: f64,
    /// `∂_t A / A`.
    pub da_ratio: f64,
    /// `∂_t Ã / Ã`.
    pub dat_ratio: f64,
}

/// All weights of a grid evaluated at one time, in the grid's FFT layout.
#[derive(Debug, Clone)]
pub struct WeightTable {
    params: WeightParams,
    grid: Arc<Grid>,
    t: f64,
    lambda: f64,
    dlambda: f64,
    entries: Vec<WeightEntry>,
}

impl WeightTable {
    /// Builds the table at time `t ≥ 0`.
    pub fn new(params: WeightParams, grid: Arc<Grid>, t: f64) -> Result<Self> {
        params.validate()?;
        let logm: Vec<f64> = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let (k, eta) = grid.mode(i);
                log_m(t, k, eta, &params)
            })
            .collect();
        Ok(Self::assemble(params, grid, t, logm))
    }

    /// Table at a later time `t ≥ self.t`, advancing the cached `m` incrementally.
    pub fn advanced(&self, t: f64) -> Result<Self> {
        if t < self.t {
            return Self::new(self.params.clone(), self.grid.clone(), t);
        }
        let t0 = self.t;
        let params = &self.params;
        let logm: Vec<f64> = self
            .entries
            .par_iter()
            .enumerate()
            .map(|(i, e)| {
                let (k, eta) = self.grid.mode(i);
                e.log_m + log_m_between(t0, t, k, eta, params)
            })
            .collect();
        Ok(Self::assemble(self.params.clone(), self.grid.clone(), t, logm))
    }

    fn assemble(params: WeightParams, grid: Arc<Grid>, t: f64, logm: Vec<f64>) -> Self {
        let lambda = lambda_at(t, &params);
        let dlambda = dt_lambda(t, &params);
        let p = &params;
        let entries = logm
            .into_par_iter()
            .enumerate()
            .map(|(i, lm)| {
                let (k, eta) = grid.mode(i);
                let lq = log_q(t, k, eta, p);
                let (la, lat) = log_a_parts(k, eta, lambda, lm, lq, p);
                let ljt = 8.0 * p.rho * eta.abs().cbrt() - lq;
                let lj = super::multipliers::logaddexp(ljt, 8.0 * p.rho * (k.abs() as f64).cbrt());
                let dm = dt_log_m(t, k, eta, p);
                let dq = dq_ratio(t, k, eta, p);
                let gev = dlambda * ((k.abs() as f64) + eta.abs()).powf(p.s);
                WeightEntry {
                    log_ml: log_ml(t, k, eta, p),
                    log_m: lm,
                    log_q: lq,
                    log_j: lj,
                    log_jt: ljt,
                    log_a: la,
                    log_at: lat,
                    dm_ratio: dm,
                    dq_ratio: dq,
                    dml_ratio: dt_log_ml(t, k, eta),
                    da_ratio: -dm - (ljt - lj).exp() * dq + gev,
                    dat_ratio: -dm - dq + gev,
                }
            })
            .collect();
        Self {
            params,
            grid,
            t,
            lambda,
            dlambda,
            entries,
        }
    }

    pub fn params(&self) -> &WeightParams {
        &self.params
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn dlambda(&self) -> f64 {
        self.dlambda
    }

    pub fn entries(&self) -> &[WeightEntry] {
        &self.entries
    }

    pub fn entry(&self, idx: usize) -> &WeightEntry {
        &self.entries[idx]
    }
}
