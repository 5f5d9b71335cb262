use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::field::{FieldLabel, SpectralField};
use super::grid::Grid;
use crate::error::Result;

/// Cached 2D FFT plans for one lattice shape.
pub struct Fft2 {
    nx: usize,
    ny: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
    scratch_len: usize,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Fft2({}x{})", self.nx, self.ny)
    }
}

type PlanCache = Mutex<HashMap<(usize, usize), Arc<Fft2>>>;

fn cache() -> &'static PlanCache {
    static CACHE: OnceLock<PlanCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl Fft2 {
    /// Returns the shared plan set for the grid's shape.
    pub fn for_grid(grid: &Grid) -> Arc<Fft2> {
        let key = (grid.n_x(), grid.n_y());
        let mut map = cache().lock().expect("fft cache poisoned");
        map.entry(key)
            .or_insert_with(|| Arc::new(Fft2::plan(key.0, key.1)))
            .clone()
    }

    fn plan(nx: usize, ny: usize) -> Self {
        let mut planner = FftPlanner::new();
        let row_fwd = planner.plan_fft_forward(ny);
        let row_inv = planner.plan_fft_inverse(ny);
        let col_fwd = planner.plan_fft_forward(nx);
        let col_inv = planner.plan_fft_inverse(nx);
        let scratch_len = [&row_fwd, &row_inv, &col_fwd, &col_inv]
            .iter()
            .map(|p| p.get_inplace_scratch_len())
            .max()
            .unwrap_or(0);
        Self {
            nx,
            ny,
            row_fwd,
            row_inv,
            col_fwd,
            col_inv,
            scratch_len,
        }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn run(&self, data: &mut [Complex64], forward: bool) {
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.scratch_len];
        let (row, col) = if forward {
            (&self.row_fwd, &self.col_fwd)
        } else {
            (&self.row_inv, &self.col_inv)
        };
        row.process_with_scratch(data, &mut scratch);
        let mut t = vec![Complex64::new(0.0, 0.0); data.len()];
        transpose(data, &mut t, self.nx, self.ny);
        col.process_with_scratch(&mut t, &mut scratch);
        transpose(&t, data, self.ny, self.nx);
    }

    /// Spectral coefficients to physical values, `f(x_a, y_b) = Σ f̂ e^{i(k x_a + η y_b)}`.
    pub fn to_physical(&self, spectral: &[Complex64], out: &mut [Complex64]) {
        out.copy_from_slice(spectral);
        self.run(out, false);
    }

    /// Physical values to spectral coefficients, in place.
    pub fn to_spectral(&self, data: &mut [Complex64]) {
        self.run(data, true);
        let s = 1.0 / self.len() as f64;
        for c in data.iter_mut() {
            *c *= s;
        }
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    const B: usize = 16;
    for r0 in (0..rows).step_by(B) {
        for c0 in (0..cols).step_by(B) {
            for r in r0..(r0 + B).min(rows) {
                for c in c0..(c0 + B).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

/// Dealiased pseudo-spectral product: coefficients of the physical-space product `a·b`
/// with every mode outside the dealias box zeroed.
pub fn transform_product(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    a.check_grid(b)?;
    let grid = a.grid().clone();
    let fft = Fft2::for_grid(&grid);
    let n = grid.len();
    let mut pa = vec![Complex64::new(0.0, 0.0); n];
    let mut pb = vec![Complex64::new(0.0, 0.0); n];
    fft.to_physical(a.coeffs(), &mut pa);
    fft.to_physical(b.coeffs(), &mut pb);
    for (x, y) in pa.iter_mut().zip(&pb) {
        *x *= y;
    }
    fft.to_spectral(&mut pa);
    let mut out = SpectralField::from_coeffs(grid, pa, FieldLabel::Other("product".into()))?;
    out.dealias();
    Ok(out)
}
