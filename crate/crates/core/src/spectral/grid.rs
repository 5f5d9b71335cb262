use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Truncated Fourier lattice for `T_x × T_{L_y}`.
///
/// Storage is row-major in FFT order: row index `ix` maps to `k`, column index `iy`
/// maps to `η = m · 2π/L_y`, with indices at or above `n/2` wrapping to negative values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n_x: usize,
    n_y: usize,
    l_y: f64,
    dealias_fraction: f64,
}

impl Grid {
    /// Builds a grid; sizes must be powers of two not below 8.
    pub fn new(n_x: usize, n_y: usize, l_y: f64, dealias_fraction: f64) -> Result<Self> {
        for (name, n) in [("n_x", n_x), ("n_y", n_y)] {
            if n < 8 || !n.is_power_of_two() {
                return Err(Error::Config(format!("{name} = {n} must be a power of two >= 8")));
            }
        }
        if !(l_y.is_finite() && l_y > 0.0) {
            return Err(Error::Config(format!("L_y = {l_y} must be positive")));
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "dealias fraction {dealias_fraction} must lie in (0, 1]"
            )));
        }
        Ok(Self {
            n_x,
            n_y,
            l_y,
            dealias_fraction,
        })
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    pub fn l_y(&self) -> f64 {
        self.l_y
    }

    pub fn dealias_fraction(&self) -> f64 {
        self.dealias_fraction
    }

    /// Number of lattice points.
    pub fn len(&self) -> usize {
        self.n_x * self.n_y
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Spacing of the η lattice, `2π/L_y`.
    pub fn eta_spacing(&self) -> f64 {
        2.0 * PI / self.l_y
    }

    /// Wavenumber `k` of row `ix`.
    #[inline]
    pub fn k_of(&self, ix: usize) -> i64 {
        wrap(ix, self.n_x)
    }

    /// Integer η-index `m` of column `iy`.
    #[inline]
    pub fn m_of(&self, iy: usize) -> i64 {
        wrap(iy, self.n_y)
    }

    /// Wavenumber `η` of column `iy`.
    #[inline]
    pub fn eta_of(&self, iy: usize) -> f64 {
        self.m_of(iy) as f64 * self.eta_spacing()
    }

    /// Flat index of `(ix, iy)`.
    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        ix * self.n_y + iy
    }

    /// Flat index of the mode `(k, m)` if it lies on the lattice.
    pub fn index_of(&self, k: i64, m: i64) -> Option<usize> {
        let ix = unwrap(k, self.n_x)?;
        let iy = unwrap(m, self.n_y)?;
        Some(self.index(ix, iy))
    }

    /// `(k, η)` at flat index `idx`.
    #[inline]
    pub fn mode(&self, idx: usize) -> (i64, f64) {
        (self.k_of(idx / self.n_y), self.eta_of(idx % self.n_y))
    }

    /// Flat index of the mode `(−k, −η)`.
    #[inline]
    pub fn mirror(&self, idx: usize) -> usize {
        let ix = idx / self.n_y;
        let iy = idx % self.n_y;
        self.index((self.n_x - ix) % self.n_x, (self.n_y - iy) % self.n_y)
    }

    /// All `k` values in ascending order, `[−n_x/2, n_x/2)`.
    pub fn k_values(&self) -> Vec<i64> {
        let h = (self.n_x / 2) as i64;
        (-h..h).collect()
    }

    /// All `η` values in ascending order.
    pub fn eta_values(&self) -> Vec<f64> {
        let h = (self.n_y / 2) as i64;
        (-h..h).map(|m| m as f64 * self.eta_spacing()).collect()
    }

    /// Largest `|k|` kept by dealiasing.
    pub fn k_keep(&self) -> i64 {
        keep_limit(self.dealias_fraction, self.n_x)
    }

    /// Largest `|m|` kept by dealiasing.
    pub fn m_keep(&self) -> i64 {
        keep_limit(self.dealias_fraction, self.n_y)
    }

    /// Whether the mode at `idx` survives dealiasing.
    #[inline]
    pub fn is_kept(&self, idx: usize) -> bool {
        let k = self.k_of(idx / self.n_y).abs();
        let m = self.m_of(idx % self.n_y).abs();
        k <= self.k_keep() && m <= self.m_keep()
    }

    /// Largest kept `|η|`.
    pub fn eta_keep(&self) -> f64 {
        self.m_keep() as f64 * self.eta_spacing()
    }

    /// Physical-space coordinates of point `(a, b)`.
    pub fn point(&self, a: usize, b: usize) -> (f64, f64) {
        (
            2.0 * PI * a as f64 / self.n_x as f64,
            self.l_y * b as f64 / self.n_y as f64,
        )
    }
}

fn wrap(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

fn unwrap(k: i64, n: usize) -> Option<usize> {
    let h = (n / 2) as i64;
    if k < -h || k >= h {
        None
    } else if k >= 0 {
        Some(k as usize)
    } else {
        Some((k + n as i64) as usize)
    }
}

fn keep_limit(fraction: f64, n: usize) -> i64 {
    (fraction * (n / 2) as f64 + 1e-9).floor() as i64
}
