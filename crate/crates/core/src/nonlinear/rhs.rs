use num_complex::Complex64;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::spectral::{p_symbol, FieldLabel, Fft2, Grid, SpectralField};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dealiased quadratic terms of the moving-frame system, in FFT layout.
#[derive(Debug, Clone)]
pub struct QuadraticTerms {
    /// `(∇^⊥φ·∇)Δ_tφ − v·∇_t w`.
    pub n_w: Vec<Complex64>,
    /// `−v·∇_t φ`.
    pub n_phi: Vec<Complex64>,
    /// `(b_≠·∇_t b^x_≠ − v_≠·∇_t v^x_≠)₀`, supported on the `k = 0` column.
    pub flux: Vec<Complex64>,
    /// Largest physical `|v^x|`, `|v^y|`, `|b^x|`, `|b^y|` seen during the evaluation.
    pub speeds: [f64; 4],
}

/// Reusable transform plan and buffers for [`QuadraticTerms`].
///
/// Real physical fields are transformed two at a time: the coefficients `F + iG` of two
/// real fields invert to `f + ig`.
#[derive(Debug)]
pub(crate) struct Quadratic {
    grid: Arc<Grid>,
    fft: Arc<Fft2>,
    packed: Vec<Vec<Complex64>>,
}

impl Quadratic {
    pub(crate) fn new(grid: Arc<Grid>) -> Self {
        let fft = Fft2::for_grid(&grid);
        let n = grid.len();
        Self {
            grid,
            fft,
            packed: vec![vec![ZERO; n]; 7],
        }
    }

    /// Quadratic terms for `(w, φ, v₀ˣ)` at time `t`; `w` must carry `w₀ = −∂_y v₀ˣ` on `k = 0`.
    pub(crate) fn eval(&mut self, w: &[Complex64], phi: &[Complex64], v0: &[Complex64], t: f64) -> QuadraticTerms {
        let g = self.grid.clone();
        let n = g.len();
        let ny = g.n_y();
        let im = |x: f64| Complex64::new(0.0, x);
        let mut spec = std::mem::take(&mut self.packed);
        for i in 0..n {
            let (k, eta) = g.mode(i);
            let kf = k as f64;
            let ik = im(kf);
            let ie = im(eta);
            let ph = phi[i];
            let p = p_symbol(kf, eta, t);
            let nonzero = i >= ny;
            let psi = if nonzero { -w[i] / p } else { ZERO };
            let j = -p * ph;
            let phi_ne = if nonzero { ph } else { ZERO };
            let bx = im(-(eta - kf * t)) * phi_ne;
            let vx = im(-(eta - kf * t)) * psi;
            let v0i = if nonzero { ZERO } else { v0[i] };
            let pair = |f: Complex64| ik * f + im(1.0) * (ie * f);
            // (φ_x, φ_y), (j_x, j_y), (ψ_x, ψ_y), (w_x, w_y), (v₀, φ_{≠,y}), ∇b^x, ∇v^x
            spec[0][i] = pair(ph);
            spec[1][i] = pair(j);
            spec[2][i] = pair(psi);
            spec[3][i] = pair(w[i]);
            spec[4][i] = v0i + im(1.0) * (ie * phi_ne);
            spec[5][i] = pair(bx);
            spec[6][i] = pair(vx);
        }
        let mut phys: Vec<Vec<Complex64>> = (0..7).map(|_| vec![ZERO; n]).collect();
        for (s, ph) in spec.iter().zip(phys.iter_mut()) {
            self.fft.to_physical(s, ph);
        }
        self.packed = spec;

        let mut out_wphi = vec![ZERO; n];
        let mut out_flux = vec![ZERO; n];
        let mut speeds = [0.0f64; 4];
        for i in 0..n {
            let (phx, phy) = (phys[0][i].re, phys[0][i].im);
            let (jx, jy) = (phys[1][i].re, phys[1][i].im);
            let (psx, psy) = (phys[2][i].re, phys[2][i].im);
            let (wx, wy) = (phys[3][i].re, phys[3][i].im);
            let (v0p, phny) = (phys[4][i].re, phys[4][i].im);
            let (bxx, bxy) = (phys[5][i].re, phys[5][i].im);
            let (vxx, vxy) = (phys[6][i].re, phys[6][i].im);
            let nw = -phy * jx + phx * jy + psy * wx - psx * wy - v0p * wx;
            let nphi = psy * phx - psx * phy - v0p * phx;
            let fl = -phny * bxx + phx * bxy + psy * vxx - psx * vxy;
            out_wphi[i] = Complex64::new(nw, nphi);
            out_flux[i] = Complex64::new(fl, 0.0);
            speeds[0] = speeds[0].max((v0p - psy).abs());
            speeds[1] = speeds[1].max(psx.abs());
            speeds[2] = speeds[2].max(phy.abs());
            speeds[3] = speeds[3].max(phx.abs());
        }
        self.fft.to_spectral(&mut out_wphi);
        self.fft.to_spectral(&mut out_flux);

        let mut n_w = vec![ZERO; n];
        let mut n_phi = vec![ZERO; n];
        let mut flux = vec![ZERO; n];
        for i in 0..n {
            if !g.is_kept(i) {
                continue;
            }
            let c = out_wphi[i];
            let cm = out_wphi[g.mirror(i)].conj();
            n_w[i] = 0.5 * (c + cm);
            n_phi[i] = Complex64::new(0.0, -0.5) * (c - cm);
            if i < ny {
                flux[i] = out_flux[i];
            }
        }
        n_phi[0] = ZERO;
        flux[0] = ZERO;
        QuadraticTerms { n_w, n_phi, flux, speeds }
    }
}

fn check_inputs(w: &SpectralField, phi: &SpectralField, v0x: &SpectralField) -> Result<()> {
    if !w.same_grid(phi) || !w.same_grid(v0x) {
        return Err(Error::Config("fields must share one grid".into()));
    }
    for (f, name) in [(w, "w"), (phi, "phi"), (v0x, "v0x")] {
        if !f.is_dealiased() {
            return Err(Error::Contract(format!("{name} is not dealiased")));
        }
    }
    let ny = w.grid().n_y();
    if v0x.coeffs()[ny..].iter().any(|c| *c != ZERO) {
        return Err(Error::Contract("v0x must be supported on k = 0".into()));
    }
    Ok(())
}

/// `w` with its `k = 0` column replaced by `−∂_y v₀ˣ`.
pub(crate) fn with_zero_mode_vorticity(grid: &Grid, w: &[Complex64], v0: &[Complex64]) -> Vec<Complex64> {
    let mut out = w.to_vec();
    for (iy, c) in out.iter_mut().take(grid.n_y()).enumerate() {
        *c = Complex64::new(0.0, -grid.eta_of(iy)) * v0[iy];
    }
    out
}

/// Quadratic terms of the system as spectral fields `(N_w, N_φ, flux₀)`.
///
/// The `k = 0` column of `w` is taken from `v₀ˣ`.
pub fn quadratic_terms(
    w: &SpectralField,
    phi: &SpectralField,
    v0x: &SpectralField,
    t: f64,
) -> Result<(SpectralField, SpectralField, SpectralField)> {
    check_inputs(w, phi, v0x)?;
    let grid = w.grid().clone();
    let wfull = with_zero_mode_vorticity(&grid, w.coeffs(), v0x.coeffs());
    let terms = Quadratic::new(grid.clone()).eval(&wfull, phi.coeffs(), v0x.coeffs(), t);
    Ok((
        SpectralField::from_coeffs(grid.clone(), terms.n_w, FieldLabel::W)?,
        SpectralField::from_coeffs(grid.clone(), terms.n_phi, FieldLabel::Phi)?,
        SpectralField::from_coeffs(grid, terms.flux, FieldLabel::V0x)?,
    ))
}

/// Full right-hand side `(∂_t w, ∂_t φ, ∂_t v₀ˣ)` of the moving-frame system:
///
/// - `∂_t w = νΔ_t w + α∂_xΔ_tφ + (∇^⊥φ·∇)Δ_tφ − v·∇_t w`
/// - `∂_t φ = α∂_xΔ_t^{-1}w − v·∇_tφ`
/// - `∂_t v₀ˣ = ν∂_y²v₀ˣ + (b_≠·∇_t b^x_≠ − v_≠·∇_t v^x_≠)₀`
///
/// with `v = v₀ˣe₁ + ∇_t^⊥Δ_t^{-1}P_≠w` and `b = ∇_t^⊥φ`. The `k = 0` column of `w` is
/// taken from `v₀ˣ`, and the returned `∂_t w` on `k = 0` is `−∂_y ∂_t v₀ˣ`.
pub fn nonlinear_rhs(
    w: &SpectralField,
    phi: &SpectralField,
    v0x: &SpectralField,
    t: f64,
    nu: f64,
    alpha: f64,
) -> Result<(SpectralField, SpectralField, SpectralField)> {
    check_inputs(w, phi, v0x)?;
    let grid = w.grid().clone();
    let ny = grid.n_y();
    let wfull = with_zero_mode_vorticity(&grid, w.coeffs(), v0x.coeffs());
    let q = Quadratic::new(grid.clone()).eval(&wfull, phi.coeffs(), v0x.coeffs(), t);
    let mut dw = q.n_w;
    let mut dphi = q.n_phi;
    let mut dv0 = q.flux;
    for i in 0..grid.len() {
        let (k, eta) = grid.mode(i);
        if i < ny {
            dv0[i] += -nu * eta * eta * v0x.coeffs()[i];
            dw[i] = Complex64::new(0.0, -eta) * dv0[i];
            continue;
        }
        let kf = k as f64;
        let p = p_symbol(kf, eta, t);
        dw[i] += -nu * p * wfull[i] - Complex64::new(0.0, alpha * kf * p) * phi.coeffs()[i];
        dphi[i] += Complex64::new(0.0, -alpha * kf / p) * wfull[i];
    }
    Ok((
        SpectralField::from_coeffs(grid.clone(), dw, FieldLabel::W)?,
        SpectralField::from_coeffs(grid.clone(), dphi, FieldLabel::Phi)?,
        SpectralField::from_coeffs(grid, dv0, FieldLabel::V0x)?,
    ))
}
