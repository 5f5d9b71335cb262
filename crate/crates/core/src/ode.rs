//! Dormand–Prince 5(4) embedded Runge–Kutta integrator for small real systems.

use crate::error::{Error, Result};

/// Step-control options for [`dopri5`].
#[derive(Debug, Clone, Copy)]
pub struct Dopri5Options {
    /// Relative tolerance, applied against the sup-norm of the state.
    pub rtol: f64,
    /// Absolute tolerance floor.
    pub atol: f64,
    /// Initial step; chosen automatically when `None`.
    pub h_init: Option<f64>,
    /// Smallest admissible step before the run is declared stiff-failed.
    pub h_min: f64,
    /// Largest admissible step.
    pub h_max: f64,
    /// Cap on the number of attempted steps.
    pub max_steps: u64,
}

impl Default for Dopri5Options {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-300,
            h_init: None,
            h_min: 1e-14,
            h_max: f64::INFINITY,
            max_steps: 2_000_000_000,
        }
    }
}

/// Step statistics of a completed integration.
#[derive(Debug, Clone, Copy, Default)]
pub struct Dopri5Stats {
    pub accepted: u64,
    pub rejected: u64,
    pub evaluations: u64,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn sup_norm<const N: usize>(y: &[f64; N]) -> f64 {
    y.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end`, calling `observer(t, y)` after every
/// accepted step (and once at `t0`). The observer may stop the run early by returning `false`.
pub fn dopri5<const N: usize, F, O>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &Dopri5Options,
    observer: O,
) -> Result<([f64; N], Dopri5Stats)>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    O: FnMut(f64, &[f64; N]) -> bool,
{
    run(f, None::<fn(f64, f64) -> [f64; N]>, t0, y0, t_end, opts, observer)
}

/// Dormand–Prince 5(4) in Lawson form for `y' = D(t) y + f(t, y)` with diagonal `D`.
///
/// `log_factor(a, b)` returns `∫_a^b D(τ) dτ` per component (`b ≥ a`); only the
/// non-stiff part `f` is sampled at the stages, so the step size is set by `f` alone.
pub fn lawson_dopri5<const N: usize, F, L, O>(
    f: F,
    log_factor: L,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &Dopri5Options,
    observer: O,
) -> Result<([f64; N], Dopri5Stats)>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    L: FnMut(f64, f64) -> [f64; N],
    O: FnMut(f64, &[f64; N]) -> bool,
{
    run(f, Some(log_factor), t0, y0, t_end, opts, observer)
}

const NODES: [f64; 6] = [0.0, C2, C3, C4, C5, 1.0];

/// `out = E(t, t_i) y + h Σ_j a_j E(t_j, t_i) k_j` with `E(t_j, t_i) = exp(Φ_i − Φ_j)`.
#[inline(always)]
fn stage<const N: usize>(
    y: &[f64; N],
    h: f64,
    phi: Option<&[[f64; N]; 6]>,
    i: usize,
    terms: &[(usize, f64, &[f64; N])],
) -> [f64; N] {
    let mut out = *y;
    match phi {
        None => {
            for (_, c, k) in terms {
                let hc = h * c;
                for n in 0..N {
                    out[n] += hc * k[n];
                }
            }
        }
        Some(phi) => {
            for n in 0..N {
                out[n] *= (phi[i][n] - phi[0][n]).exp();
            }
            for (j, c, k) in terms {
                let hc = h * c;
                for n in 0..N {
                    out[n] += hc * (phi[i][n] - phi[*j][n]).exp() * k[n];
                }
            }
        }
    }
    out
}

fn run<const N: usize, F, L, O>(
    mut f: F,
    mut log_factor: Option<L>,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &Dopri5Options,
    mut observer: O,
) -> Result<([f64; N], Dopri5Stats)>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    L: FnMut(f64, f64) -> [f64; N],
    O: FnMut(f64, &[f64; N]) -> bool,
{
    let mut stats = Dopri5Stats::default();
    let mut t = t0;
    let mut y = y0;
    if !observer(t, &y) || t_end <= t0 {
        return Ok((y, stats));
    }
    let mut k1 = f(t, &y);
    stats.evaluations += 1;
    let span = t_end - t0;
    let mut h = match opts.h_init {
        Some(h) => h,
        None => {
            let ny = sup_norm(&y);
            let nf = sup_norm(&k1);
            let guess = if ny == 0.0 || nf == 0.0 {
                1e-3 * span
            } else {
                0.01 * ny / nf
            };
            guess.min(span).min(opts.h_max).max(opts.h_min)
        }
    };
    let mut phi = [[0.0; N]; 6];
    let mut steps = 0u64;
    while t < t_end {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::Integration {
                t,
                reason: "step budget exhausted".into(),
            });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let ph = match log_factor.as_mut() {
            Some(lf) => {
                for (i, c) in NODES.iter().enumerate().skip(1) {
                    phi[i] = lf(t, t + c * h);
                }
                Some(&phi)
            }
            None => None,
        };
        let k2 = f(t + C2 * h, &stage(&y, h, ph, 1, &[(0, A21, &k1)]));
        let k3 = f(t + C3 * h, &stage(&y, h, ph, 2, &[(0, A31, &k1), (1, A32, &k2)]));
        let k4 = f(t + C4 * h, &stage(&y, h, ph, 3, &[(0, A41, &k1), (1, A42, &k2), (2, A43, &k3)]));
        let k5 = f(
            t + C5 * h,
            &stage(&y, h, ph, 4, &[(0, A51, &k1), (1, A52, &k2), (2, A53, &k3), (3, A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &stage(&y, h, ph, 5, &[(0, A61, &k1), (1, A62, &k2), (2, A63, &k3), (3, A64, &k4), (4, A65, &k5)]),
        );
        let y_new = stage(&y, h, ph, 5, &[(0, B1, &k1), (2, B3, &k3), (3, B4, &k4), (4, B5, &k5), (5, B6, &k6)]);
        let k7 = f(t + h, &y_new);
        stats.evaluations += 6;
        let zero = [0.0; N];
        let err_vec = stage(
            &zero,
            h,
            ph,
            5,
            &[(0, E1, &k1), (2, E3, &k3), (3, E4, &k4), (4, E5, &k5), (5, E6, &k6), (5, E7, &k7)],
        );
        let scale = opts.atol + opts.rtol * sup_norm(&y).max(sup_norm(&y_new));
        let mut acc = 0.0;
        for e in err_vec.iter() {
            let r = e / scale;
            acc += r * r;
        }
        let err = (acc / N as f64).sqrt();
        if !err.is_finite() {
            h *= 0.1;
            stats.rejected += 1;
            if h < opts.h_min {
                return Err(Error::Integration {
                    t,
                    reason: "non-finite stage values".into(),
                });
            }
            continue;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        if err <= 1.0 {
            t = if last { t_end } else { t + h };
            y = y_new;
            k1 = k7;
            stats.accepted += 1;
            if !observer(t, &y) {
                break;
            }
            h = (h * factor).min(opts.h_max);
        } else {
            stats.rejected += 1;
            h *= factor.min(1.0);
            if h < opts.h_min {
                return Err(Error::Integration {
                    t,
                    reason: format!("step size {h:.3e} below minimum {:.3e}", opts.h_min),
                });
            }
        }
    }
    Ok((y, stats))
}

/// Options for [`radau5_linear`].
#[derive(Debug, Clone, Copy)]
pub struct RadauOptions {
    /// Relative tolerance against the sup-norm of the state.
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub max_steps: u64,
}

impl Default for RadauOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-300,
            h_init: 1e-3,
            h_min: 1e-14,
            max_steps: 10_000_000,
        }
    }
}

const SQ6: f64 = 2.449_489_742_783_178;

/// Solves `a x = b` in place by Gaussian elimination with partial pivoting.
fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize) -> Option<()> {
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
        if a[piv * n + col] == 0.0 || !a[piv * n + col].is_finite() {
            return None;
        }
        if piv != col {
            for c in 0..n {
                a.swap(piv * n + c, col * n + c);
            }
            b.swap(piv, col);
        }
        let d = a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / d;
            if f != 0.0 {
                for c in col..n {
                    a[r * n + c] -= f * a[col * n + c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    for r in (0..n).rev() {
        let mut acc = b[r];
        for c in r + 1..n {
            acc -= a[r * n + c] * b[c];
        }
        b[r] = acc / a[r * n + r];
    }
    Some(())
}

/// One Radau IIA (3 stages, order 5) step of `y' = M(t) y`.
fn radau_step<const N: usize, M>(m: &mut M, t: f64, y: &[f64; N], h: f64) -> Option<[f64; N]>
where
    M: FnMut(f64) -> [[f64; N]; N],
{
    let c = [(4.0 - SQ6) / 10.0, (4.0 + SQ6) / 10.0, 1.0];
    let a = [
        [(88.0 - 7.0 * SQ6) / 360.0, (296.0 - 169.0 * SQ6) / 1800.0, (-2.0 + 3.0 * SQ6) / 225.0],
        [(296.0 + 169.0 * SQ6) / 1800.0, (88.0 + 7.0 * SQ6) / 360.0, (-2.0 - 3.0 * SQ6) / 225.0],
        [(16.0 - SQ6) / 36.0, (16.0 + SQ6) / 36.0, 1.0 / 9.0],
    ];
    let mats = [m(t + c[0] * h), m(t + c[1] * h), m(t + c[2] * h)];
    let n = 3 * N;
    let mut sys = vec![0.0; n * n];
    let mut rhs = vec![0.0; n];
    // Stage values Y_i = y + h Σ_j a_ij M(t_j) Y_j.
    for i in 0..3 {
        for r in 0..N {
            let row = i * N + r;
            rhs[row] = y[r];
            sys[row * n + row] += 1.0;
            for j in 0..3 {
                for cidx in 0..N {
                    sys[row * n + j * N + cidx] -= h * a[i][j] * mats[j][r][cidx];
                }
            }
        }
    }
    solve_dense(&mut sys, &mut rhs, n)?;
    let mut out = [0.0; N];
    out.copy_from_slice(&rhs[2 * N..]);
    out.iter().all(|v| v.is_finite()).then_some(out)
}

/// Integrates the linear system `y' = M(t) y` from `t0` to `t_end` with the L-stable
/// Radau IIA method of order 5 and step-doubling error control.
///
/// Stiff components that are slaved to slower ones do not restrict the step, which makes
/// this the integrator of choice when `M` has entries far larger than the solution's rate
/// of change.
pub fn radau5_linear<const N: usize, M>(
    mut m: M,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &RadauOptions,
) -> Result<([f64; N], Dopri5Stats)>
where
    M: FnMut(f64) -> [[f64; N]; N],
{
    let mut stats = Dopri5Stats::default();
    let mut t = t0;
    let mut y = y0;
    let mut h = opts.h_init.min(t_end - t0);
    while t < t_end {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::Integration {
                t,
                reason: "step budget exhausted".into(),
            });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let full = radau_step(&mut m, t, &y, h);
        let half = radau_step(&mut m, t, &y, 0.5 * h).and_then(|mid| radau_step(&mut m, t + 0.5 * h, &mid, 0.5 * h));
        stats.evaluations += 9;
        let err = match (full, half) {
            (Some(f), Some(hh)) => {
                let scale = opts.atol + opts.rtol * sup_norm(&y).max(sup_norm(&hh));
                f.iter().zip(&hh).fold(0.0f64, |e, (a, b)| e.max((a - b).abs())) / (31.0 * scale)
            }
            _ => f64::INFINITY,
        };
        if err <= 1.0 {
            t = if last { t_end } else { t + h };
            y = half.expect("accepted step has a value");
            stats.accepted += 1;
            let factor = if err == 0.0 { 4.0 } else { (0.9 * err.powf(-1.0 / 6.0)).clamp(0.2, 4.0) };
            h *= factor;
        } else {
            stats.rejected += 1;
            h *= if err.is_finite() { (0.9 * err.powf(-1.0 / 6.0)).clamp(0.1, 0.9) } else { 0.1 };
            if h < opts.h_min {
                return Err(Error::Integration {
                    t,
                    reason: format!("step size {h:.3e} below minimum {:.3e}", opts.h_min),
                });
            }
        }
    }
    Ok((y, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        let opts = Dopri5Options {
            rtol: 1e-11,
            ..Default::default()
        };
        let two_pi = 2.0 * std::f64::consts::PI;
        let (y, _) = dopri5(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [1.0, 0.0], two_pi, &opts, |_, _| true).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-9 && y[1].abs() < 1e-9);
    }

    #[test]
    fn fifth_order_convergence_fixed_steps() {
        let run = |h: f64| {
            let opts = Dopri5Options {
                rtol: 1.0,
                atol: 1e300,
                h_init: Some(h),
                h_max: h,
                ..Default::default()
            };
            dopri5(|t, y: &[f64; 1]| [y[0] * t.cos()], 0.0, [1.0], 2.0, &opts, |_, _| true).unwrap().0[0]
        };
        let exact = 2f64.sin().exp();
        let e1 = (run(0.1) - exact).abs();
        let e2 = (run(0.05) - exact).abs();
        let order = (e1 / e2).log2();
        assert!(order > 4.5, "order {order}");
    }

    #[test]
    fn lawson_form_steps_over_stiff_decay() {
        // x' = −x/2, z' = −μ z + x/μ²: z is slaved to x/μ³ and stiff explicit stepping would need h < 3/μ
        let mu: f64 = 1e6;
        let opts = Dopri5Options {
            rtol: 1e-10,
            atol: 1e-300,
            ..Default::default()
        };
        let (y, stats) = lawson_dopri5(
            |_, y: &[f64; 2]| [-0.5 * y[0], y[0] / (mu * mu)],
            |a, b| [0.0, -mu * (b - a)],
            0.0,
            [1.0, 1.0 / (mu * mu * (mu - 0.5))],
            3.0,
            &opts,
            |_, _| true,
        )
        .unwrap();
        let x = (-1.5f64).exp();
        assert!((y[0] - x).abs() < 1e-10);
        assert!((y[1] - x / (mu * mu * (mu - 0.5))).abs() < 1e-10);
        assert!(stats.accepted < 1000, "{}", stats.accepted);
        let (z, _) = lawson_dopri5(|_, _: &[f64; 1]| [0.0], |a, b| [-(b - a)], 0.0, [1.0], 2.0, &opts, |_, _| true).unwrap();
        assert!((z[0] - (-2f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn observer_stops_early() {
        let mut n = 0;
        let (_, stats) = dopri5(
            |_, y: &[f64; 1]| [-y[0]],
            0.0,
            [1.0],
            10.0,
            &Dopri5Options::default(),
            |_, _| {
                n += 1;
                n < 3
            },
        )
        .unwrap();
        assert_eq!(stats.accepted, 2);
    }
    #[test]
    fn radau_handles_slaved_stiff_component() {
        // z' = −μ(1+t²) z + x, x' = −x/2: z tracks x/(μ(1+t²)) and the step is set by x alone.
        let mu = 1e8;
        let (y, stats) = radau5_linear(
            |t| [[-0.5, 0.0], [1.0, -mu * (1.0 + t * t)]],
            0.0,
            [1.0, 0.0],
            3.0,
            &RadauOptions::default(),
        )
        .unwrap();
        let x = (-1.5f64).exp();
        assert!((y[0] - x).abs() < 1e-8 * x, "{} vs {x}", y[0]);
        assert!((y[1] / (x / (mu * 10.0)) - 1.0).abs() < 1e-6, "{}", y[1]);
        assert!(stats.accepted < 500, "{}", stats.accepted);
    }

    #[test]
    fn radau_rotation_is_accurate() {
        let opts = RadauOptions {
            rtol: 1e-11,
            ..Default::default()
        };
        let two_pi = 2.0 * std::f64::consts::PI;
        let (y, _) = radau5_linear(|_| [[0.0, 1.0], [-1.0, 0.0]], 0.0, [1.0, 0.0], two_pi, &opts).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-9 && y[1].abs() < 1e-9);
    }
}
