use num_complex::Complex64;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::spectral::{p_symbol, FieldLabel, Grid, SpectralField};

/// `(φ, G, v₀ˣ)` at time `t`; `G` vanishes on `k = 0` and `v₀ˣ` lives on `k = 0` only.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub t: f64,
    pub phi: SpectralField,
    pub g: SpectralField,
    pub v0x: SpectralField,
}

impl FlowState {
    /// Validates the shared grid and the column supports.
    pub fn new(t: f64, phi: SpectralField, g: SpectralField, v0x: SpectralField) -> Result<Self> {
        if !phi.same_grid(&g) || !phi.same_grid(&v0x) {
            return Err(Error::Config("flow state fields must share one grid".into()));
        }
        let ny = phi.grid().n_y();
        if g.coeffs()[..ny].iter().any(|c| *c != Complex64::new(0.0, 0.0)) {
            return Err(Error::Contract("G must vanish on the k = 0 column".into()));
        }
        if v0x.coeffs()[ny..].iter().any(|c| *c != Complex64::new(0.0, 0.0)) {
            return Err(Error::Contract("v0x must be supported on k = 0".into()));
        }
        Ok(Self { t, phi, g, v0x })
    }

    /// Zero state on `grid`.
    pub fn zeros(grid: Arc<Grid>, t: f64) -> Self {
        Self {
            t,
            phi: SpectralField::zeros(grid.clone(), FieldLabel::Phi),
            g: SpectralField::zeros(grid.clone(), FieldLabel::G),
            v0x: SpectralField::zeros(grid, FieldLabel::V0x),
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.phi.grid()
    }
}

/// Symbol of `G` in terms of `(ŵ, φ̂)`: `Ĝ = −(ν ŵ + iαk φ̂)/p` on `k ≠ 0`.
pub(crate) fn g_from_w(k: i64, eta: f64, t: f64, w: Complex64, phi: Complex64, nu: f64, alpha: f64) -> Complex64 {
    let kf = k as f64;
    let p = p_symbol(kf, eta, t);
    -(nu * w + Complex64::new(0.0, alpha * kf) * phi) / p
}

/// Inverse of [`g_from_w`]: `ŵ = −(p/ν) Ĝ − (iαk/ν) φ̂`.
pub(crate) fn w_from_g(k: i64, eta: f64, t: f64, g: Complex64, phi: Complex64, nu: f64, alpha: f64) -> Complex64 {
    let kf = k as f64;
    let p = p_symbol(kf, eta, t);
    -(p * g + Complex64::new(0.0, alpha * kf) * phi) / nu
}

fn check_mean_free(f: &SpectralField, name: &str) -> Result<()> {
    if f.coeffs()[0] != Complex64::new(0.0, 0.0) {
        return Err(Error::Contract(format!("{name} must have zero (0,0) mode")));
    }
    Ok(())
}

/// `G = νψ_≠ + α∂_xΔ_t^{-1}φ_≠` with `ψ_≠ = Δ_t^{-1}P_≠ w`.
pub fn to_good_unknowns(
    w: &SpectralField,
    phi: &SpectralField,
    v0x: &SpectralField,
    t: f64,
    nu: f64,
    alpha: f64,
) -> Result<FlowState> {
    if !w.same_grid(phi) || !w.same_grid(v0x) {
        return Err(Error::Config("fields must share one grid".into()));
    }
    check_mean_free(w, "w")?;
    check_mean_free(phi, "phi")?;
    let grid = w.grid().clone();
    let ny = grid.n_y();
    let mut g = SpectralField::zeros(grid.clone(), FieldLabel::G);
    for (i, out) in g.coeffs_mut().iter_mut().enumerate().skip(ny) {
        let (k, eta) = grid.mode(i);
        *out = g_from_w(k, eta, t, w.coeffs()[i], phi.coeffs()[i], nu, alpha);
    }
    let v0 = v0x.project(crate::spectral::ModePart::ZeroMode).with_label(FieldLabel::V0x);
    FlowState::new(t, phi.clone().with_label(FieldLabel::Phi), g, v0)
}

/// Recovers `(w, φ, v₀ˣ)`: `w_≠ = Δ_t(G − α∂_xΔ_t^{-1}φ_≠)/ν`, `w₀ = −∂_y v₀ˣ`.
pub fn from_good_unknowns(state: &FlowState, nu: f64, alpha: f64) -> Result<(SpectralField, SpectralField, SpectralField)> {
    if nu == 0.0 {
        return Err(Error::Domain("G cannot be inverted to w when nu = 0".into()));
    }
    let grid = state.grid().clone();
    let ny = grid.n_y();
    let mut w = SpectralField::zeros(grid.clone(), FieldLabel::W);
    for (i, out) in w.coeffs_mut().iter_mut().enumerate() {
        let (k, eta) = grid.mode(i);
        *out = if i < ny {
            Complex64::new(0.0, -eta) * state.v0x.coeffs()[i]
        } else {
            w_from_g(k, eta, state.t, state.g.coeffs()[i], state.phi.coeffs()[i], nu, alpha)
        };
    }
    Ok((w, state.phi.clone(), state.v0x.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random(grid: &Arc<Grid>, rng: &mut ChaCha8Rng, label: FieldLabel) -> SpectralField {
        let mut f = SpectralField::zeros(grid.clone(), label);
        for k in 0..=3i64 {
            for m in -6..=6i64 {
                if k == 0 && m <= 0 {
                    continue;
                }
                let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                f.set_real_pair(k, m, c).unwrap();
            }
        }
        f
    }

    fn grid() -> Arc<Grid> {
        Arc::new(Grid::new(8, 16, 4.0 * PI, 1.0).unwrap())
    }

    #[test]
    fn round_trip_is_identity() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let phi = random(&g, &mut rng, FieldLabel::Phi);
        let v0 = random(&g, &mut rng, FieldLabel::V0x).project(crate::spectral::ModePart::ZeroMode);
        let mut w = random(&g, &mut rng, FieldLabel::W);
        for iy in 0..g.n_y() {
            w.coeffs_mut()[iy] = Complex64::new(0.0, -g.eta_of(iy)) * v0.coeffs()[iy];
        }
        for (t, nu, alpha) in [(0.0, 1.0, 1.0), (3.7, 0.3, -2.0), (25.0, 2.0, 0.5)] {
            let s = to_good_unknowns(&w, &phi, &v0, t, nu, alpha).unwrap();
            let (w2, phi2, v02) = from_good_unknowns(&s, nu, alpha).unwrap();
            for (a, b) in [(&w, &w2), (&phi, &phi2), (&v0, &v02)] {
                let err: f64 = a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
                assert!(err <= 1e-12 * a.max_abs(), "t = {t}: {err:e}");
            }
        }
    }

    #[test]
    fn without_phi_g_is_scaled_stream_function() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let w = random(&g, &mut rng, FieldLabel::W);
        let zero = SpectralField::zeros(g.clone(), FieldLabel::Phi);
        let (t, nu) = (1.5, 0.7);
        let s = to_good_unknowns(&w, &zero, &zero, t, nu, 1.0).unwrap();
        for i in g.n_y()..g.len() {
            let (k, eta) = g.mode(i);
            let expect = -nu * w.coeffs()[i] / p_symbol(k as f64, eta, t);
            assert!((s.g.coeffs()[i] - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn without_w_g_is_magnetic_symbol() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let phi = random(&g, &mut rng, FieldLabel::Phi);
        let zero = SpectralField::zeros(g.clone(), FieldLabel::W);
        let t = 2.0;
        let s = to_good_unknowns(&zero, &phi, &zero, t, 1.0, 1.0).unwrap();
        for i in g.n_y()..g.len() {
            let (k, eta) = g.mode(i);
            let kf = k as f64;
            let expect = Complex64::new(0.0, -kf / (kf * kf + (eta - kf * t).powi(2))) * phi.coeffs()[i];
            assert!((s.g.coeffs()[i] - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn inverse_needs_viscosity() {
        let s = FlowState::zeros(grid(), 0.0);
        assert!(matches!(from_good_unknowns(&s, 0.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_nonzero_mean() {
        let g = grid();
        let mut w = SpectralField::zeros(g.clone(), FieldLabel::W);
        w.coeffs_mut()[0] = Complex64::new(1.0, 0.0);
        let z = SpectralField::zeros(g, FieldLabel::Phi);
        assert!(matches!(to_good_unknowns(&w, &z, &z, 0.0, 1.0, 1.0), Err(Error::Contract(_))));
    }
}
