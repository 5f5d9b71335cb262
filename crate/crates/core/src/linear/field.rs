use num_complex::Complex64;
use rayon::prelude::*;

use super::rhs::{LinearParams, ModeState};
use super::trajectory::integrate_mode_final;
use crate::error::{Error, Result};
use crate::nonlinear::FlowState;

/// Evolves every nonzero-`k` mode of `init` independently to `t_end` and applies the
/// heat factor `e^{−νη²(t_end − t)}` to `v₀ˣ`.
///
/// Modes with `k < 0` whose mirror `(−k, −η)` is on the grid are set to the conjugate of
/// the mirror's solution, which the system maps onto each other exactly.
pub fn linear_field_solution(init: &FlowState, t_end: f64, rtol: f64, lp: &LinearParams) -> Result<FlowState> {
    let grid = init.grid().clone();
    let ny = grid.n_y();
    if init.g.coeffs()[..ny].iter().any(|c| c.norm() != 0.0) {
        return Err(Error::Contract("G must vanish on the k = 0 column".into()));
    }
    let t0 = init.t;
    let exact_mirror = |i: usize| {
        let (k, eta) = grid.mode(i);
        let (km, em) = grid.mode(grid.mirror(i));
        km == -k && em == -eta
    };
    let todo: Vec<usize> = (ny..grid.len()).filter(|&i| grid.mode(i).0 > 0 || !exact_mirror(i)).collect();
    let solved: Vec<(usize, Complex64, Complex64)> = todo
        .par_iter()
        .map(|&i| {
            let (k, eta) = grid.mode(i);
            let (g, phi) = (init.g.coeffs()[i], init.phi.coeffs()[i]);
            if g.norm() == 0.0 && phi.norm() == 0.0 {
                return Ok((i, g, phi));
            }
            let s = integrate_mode_final(&ModeState { k, eta, g, phi, t: t0 }, t_end, rtol, lp)?;
            Ok((i, s.g, s.phi))
        })
        .collect::<Result<_>>()?;
    let mut out = init.clone();
    out.t = t_end;
    for (i, g, phi) in solved {
        out.g.coeffs_mut()[i] = g;
        out.phi.coeffs_mut()[i] = phi;
        if grid.mode(i).0 > 0 && exact_mirror(i) {
            let j = grid.mirror(i);
            out.g.coeffs_mut()[j] = g.conj();
            out.phi.coeffs_mut()[j] = phi.conj();
        }
    }
    let dt = t_end - t0;
    for i in 0..ny {
        let eta = grid.eta_of(i);
        out.v0x.coeffs_mut()[i] = init.v0x.coeffs()[i] * (-lp.nu * eta * eta * dt).exp();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn single_mode_matches_mode_integrator_and_heat_factor() {
        let grid = Arc::new(Grid::new(8, 8, 2.0 * PI, 1.0).unwrap());
        let mut init = FlowState::zeros(grid.clone(), 0.0);
        let (g0, p0) = (Complex64::new(0.1, -0.2), Complex64::new(1.0, 0.5));
        init.g.set_real_pair(2, -1, g0).unwrap();
        init.phi.set_real_pair(2, -1, p0).unwrap();
        init.v0x.set_real_pair(0, 1, Complex64::new(1.0, 0.0)).unwrap();
        let lp = LinearParams::default();
        let out = linear_field_solution(&init, 4.0, 1e-10, &lp).unwrap();
        let direct = integrate_mode_final(&ModeState { k: 2, eta: -1.0, g: g0, phi: p0, t: 0.0 }, 4.0, 1e-10, &lp).unwrap();
        assert!((out.g.get(2, -1) - direct.g).norm() < 1e-14);
        assert!((out.phi.get(2, -1) - direct.phi).norm() < 1e-14);
        assert!((out.phi.get(-2, 1) - direct.phi.conj()).norm() < 1e-14);
        assert!((out.v0x.get(0, 1).re - (-4.0f64).exp()).abs() < 1e-15);
        assert_eq!(out.t, 4.0);
    }
}
