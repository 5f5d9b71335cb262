use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

use super::grid::Grid;
use crate::error::{Error, Result};

/// Physical unknown represented by a field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldLabel {
    Phi,
    G,
    W,
    Psi,
    V0x,
    J,
    Other(String),
}

impl fmt::Display for FieldLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldLabel::Phi => write!(f, "phi"),
            FieldLabel::G => write!(f, "G"),
            FieldLabel::W => write!(f, "w"),
            FieldLabel::Psi => write!(f, "psi"),
            FieldLabel::V0x => write!(f, "v0x"),
            FieldLabel::J => write!(f, "j"),
            FieldLabel::Other(s) => write!(f, "{s}"),
        }
    }
}

impl FieldLabel {
    pub fn parse(s: &str) -> Self {
        match s {
            "phi" => FieldLabel::Phi,
            "G" => FieldLabel::G,
            "w" => FieldLabel::W,
            "psi" => FieldLabel::Psi,
            "v0x" => FieldLabel::V0x,
            "j" => FieldLabel::J,
            other => FieldLabel::Other(other.to_string()),
        }
    }
}

/// Which part of a field [`SpectralField::project`] keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModePart {
    /// The `k = 0` column (x-average).
    ZeroMode,
    /// Everything except the `k = 0` column.
    NonzeroModes,
}

/// Fourier coefficients on a [`Grid`], stored in FFT order.
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: Arc<Grid>,
    coeffs: Vec<Complex64>,
    label: FieldLabel,
}

impl SpectralField {
    pub fn zeros(grid: Arc<Grid>, label: FieldLabel) -> Self {
        let n = grid.len();
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); n],
            label,
        }
    }

    /// Wraps raw coefficients (FFT order).
    pub fn from_coeffs(grid: Arc<Grid>, coeffs: Vec<Complex64>, label: FieldLabel) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::Config(format!(
                "coefficient count {} does not match grid size {}",
                coeffs.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, coeffs, label })
    }

    /// Builds a field from a function of `(k, η)`.
    pub fn from_fn(grid: Arc<Grid>, label: FieldLabel, f: impl Fn(i64, f64) -> Complex64) -> Self {
        let coeffs = (0..grid.len())
            .map(|i| {
                let (k, eta) = grid.mode(i);
                f(k, eta)
            })
            .collect();
        Self { grid, coeffs, label }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn label(&self) -> &FieldLabel {
        &self.label
    }

    pub fn with_label(mut self, label: FieldLabel) -> Self {
        self.label = label;
        self
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient at `(k, m)` where `η = m · 2π/L_y`.
    pub fn get(&self, k: i64, m: i64) -> Complex64 {
        self.grid
            .index_of(k, m)
            .map(|i| self.coeffs[i])
            .unwrap_or_default()
    }

    /// Sets the coefficient at `(k, m)`.
    pub fn set(&mut self, k: i64, m: i64, value: Complex64) -> Result<()> {
        let i = self
            .grid
            .index_of(k, m)
            .ok_or_else(|| Error::Domain(format!("mode ({k}, {m}) is off the lattice")))?;
        self.coeffs[i] = value;
        Ok(())
    }

    /// Sets `(k, m)` to `value` and `(−k, −m)` to its conjugate.
    pub fn set_real_pair(&mut self, k: i64, m: i64, value: Complex64) -> Result<()> {
        self.set(k, m, value)?;
        self.set(-k, -m, value.conj())
    }

    pub fn same_grid(&self, other: &SpectralField) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    pub(crate) fn check_grid(&self, other: &SpectralField) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::Config("fields live on different grids".into()))
        }
    }

    /// Lattice sum `Σ |f̂|²` (the physical-space mean of `|f|²`).
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Real inner product `Re Σ conj(a) b`.
    pub fn inner(&self, other: &SpectralField) -> Result<f64> {
        self.check_grid(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a.conj() * b).re)
            .sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()))
    }

    /// `self + c · other`.
    pub fn axpy(&mut self, c: Complex64, other: &SpectralField) -> Result<()> {
        self.check_grid(other)?;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += c * b;
        }
        Ok(())
    }

    pub fn scale(&mut self, c: Complex64) {
        for a in &mut self.coeffs {
            *a *= c;
        }
    }

    /// Pointwise multiplication by a symbol `σ(k, η, t)`.
    ///
    /// A non-finite symbol value is tolerated only where the coefficient vanishes.
    pub fn apply_multiplier(&self, symbol: impl Fn(i64, f64, f64) -> Complex64, t: f64) -> Result<SpectralField> {
        let mut out = self.clone();
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            let (k, eta) = self.grid.mode(i);
            let s = symbol(k, eta, t);
            if !(s.re.is_finite() && s.im.is_finite()) {
                if *c == Complex64::new(0.0, 0.0) {
                    continue;
                }
                return Err(Error::Domain(format!(
                    "singular symbol meets nonzero coefficient at (k, η) = ({k}, {eta})"
                )));
            }
            *c *= s;
        }
        Ok(out)
    }

    /// Keeps only the `k = 0` column or only the `k ≠ 0` columns.
    pub fn project(&self, part: ModePart) -> SpectralField {
        let mut out = self.clone();
        let ny = self.grid.n_y();
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            let zero = i / ny == 0;
            let keep = match part {
                ModePart::ZeroMode => zero,
                ModePart::NonzeroModes => !zero,
            };
            if !keep {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        out
    }

    /// Zeroes every mode outside the dealias box.
    pub fn dealias(&mut self) {
        let g = self.grid.clone();
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            if !g.is_kept(i) {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Whether all modes outside the dealias box are exactly zero.
    pub fn is_dealiased(&self) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| self.grid.is_kept(i) || *c == Complex64::new(0.0, 0.0))
    }

    /// Largest `|f̂(−k,−η) − conj f̂(k,η)|`, ignoring Nyquist rows and columns.
    pub fn conjugate_symmetry_error(&self) -> f64 {
        let g = &self.grid;
        let (hx, hy) = ((g.n_x() / 2) as i64, (g.n_y() / 2) as i64);
        let mut worst = 0.0f64;
        for i in 0..g.len() {
            let k = g.k_of(i / g.n_y());
            let m = g.m_of(i % g.n_y());
            if k == -hx || m == -hy {
                continue;
            }
            let d = (self.coeffs[g.mirror(i)] - self.coeffs[i].conj()).norm();
            worst = worst.max(d);
        }
        worst
    }

    /// Coefficients in ascending `(k, η)` order: rows `k = −n_x/2 …`, columns `η` ascending.
    pub fn centered_coeffs(&self) -> Vec<Complex64> {
        let g = &self.grid;
        let (nx, ny) = (g.n_x(), g.n_y());
        let mut out = Vec::with_capacity(g.len());
        for r in 0..nx {
            let ix = (r + nx / 2) % nx;
            for c in 0..ny {
                let iy = (c + ny / 2) % ny;
                out.push(self.coeffs[g.index(ix, iy)]);
            }
        }
        out
    }

    /// Inverse of [`SpectralField::centered_coeffs`].
    pub fn from_centered(grid: Arc<Grid>, centered: &[Complex64], label: FieldLabel) -> Result<Self> {
        let (nx, ny) = (grid.n_x(), grid.n_y());
        if centered.len() != nx * ny {
            return Err(Error::Config("centered coefficient count mismatch".into()));
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); nx * ny];
        for r in 0..nx {
            let ix = (r + nx / 2) % nx;
            for c in 0..ny {
                let iy = (c + ny / 2) % ny;
                coeffs[grid.index(ix, iy)] = centered[r * ny + c];
            }
        }
        Ok(Self { grid, coeffs, label })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Arc<Grid> {
        Arc::new(Grid::new(8, 8, 2.0 * PI, 2.0 / 3.0).unwrap())
    }

    fn sample(g: &Arc<Grid>) -> SpectralField {
        SpectralField::from_fn(g.clone(), FieldLabel::Phi, |k, eta| {
            Complex64::new((k as f64 * 0.7 + eta).sin(), (k as f64 - 0.3 * eta).cos())
        })
    }

    #[test]
    fn projections_reassemble() {
        let g = grid();
        let f = sample(&g);
        let mut sum = f.project(ModePart::ZeroMode);
        sum.axpy(Complex64::new(1.0, 0.0), &f.project(ModePart::NonzeroModes)).unwrap();
        assert_eq!(sum.coeffs(), f.coeffs());
        let p0 = f.project(ModePart::ZeroMode);
        assert_eq!(p0.project(ModePart::ZeroMode).coeffs(), p0.coeffs());
    }

    #[test]
    fn zero_projection_of_k1_field() {
        let g = grid();
        let mut f = SpectralField::zeros(g, FieldLabel::Phi);
        f.set_real_pair(1, 2, Complex64::new(1.0, 2.0)).unwrap();
        assert_eq!(f.project(ModePart::ZeroMode).norm(), 0.0);
    }

    #[test]
    fn multiplier_cases() {
        let g = grid();
        let f = sample(&g);
        let same = f.apply_multiplier(|_, _, _| Complex64::new(1.0, 0.0), 0.0).unwrap();
        assert_eq!(same.coeffs(), f.coeffs());
        let zero = SpectralField::zeros(g.clone(), FieldLabel::Phi);
        let z = zero.apply_multiplier(|k, eta, t| Complex64::new(k as f64 + eta + t, 1.0), 1.0).unwrap();
        assert_eq!(z.norm(), 0.0);
        let mut single = SpectralField::zeros(g.clone(), FieldLabel::Phi);
        single.set(1, 0, Complex64::new(1.0, 0.0)).unwrap();
        let lap = single
            .apply_multiplier(|k, eta, t| Complex64::new(-crate::spectral::p_symbol(k as f64, eta, t), 0.0), 2.0)
            .unwrap();
        assert_eq!(lap.get(1, 0), Complex64::new(-5.0, 0.0));
    }

    #[test]
    fn singular_multiplier_reports_mode() {
        let g = grid();
        let f = sample(&g);
        let err = f
            .apply_multiplier(|k, eta, _| Complex64::new(1.0 / (k as f64 * k as f64 + eta * eta), 0.0), 0.0)
            .unwrap_err();
        assert!(err.to_string().contains("(0, 0)"));
        let nz = f.project(ModePart::NonzeroModes);
        assert!(nz
            .apply_multiplier(|k, eta, _| Complex64::new(1.0 / (k as f64 * k as f64 + eta * eta), 0.0), 0.0)
            .is_ok());
    }

    #[test]
    fn centered_roundtrip() {
        let g = grid();
        let f = sample(&g);
        let c = f.centered_coeffs();
        assert_eq!(c[0], f.get(-4, -4));
        let back = SpectralField::from_centered(g, &c, FieldLabel::Phi).unwrap();
        assert_eq!(back.coeffs(), f.coeffs());
    }
}
