use serde::Serialize;

use crate::error::{Error, Result};

/// Least-squares line `y = intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub samples: usize,
}

/// Ordinary least squares on `(x, y)` pairs. `R² = 1` when `y` has no spread beyond rounding.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Fit(format!("need at least 2 paired samples, got {} and {}", x.len(), y.len())));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if !(sxx > 0.0) {
        return Err(Error::Fit("abscissae have no spread".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let scale: f64 = y.iter().map(|v| v * v).sum();
    let r_squared = if syy > 1e-24 * scale { 1.0 - sse / syy } else { 1.0 };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
        samples: x.len(),
    })
}

/// Power law `v ≈ prefactor · t^exponent` fitted on `window`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub exponent: f64,
    pub prefactor: f64,
    pub window: (f64, f64),
    pub r_squared: f64,
    pub samples: usize,
}

/// Minimum number of samples inside the fit window.
pub const MIN_FIT_SAMPLES: usize = 10;

/// Least squares of `log v` against `log t` over the samples with `t` in `window`.
pub fn fit_power_law(series: &[(f64, f64)], window: (f64, f64)) -> Result<FitResult> {
    let (a, b) = window;
    if !(a > 0.0 && b > a) {
        return Err(Error::Fit(format!("fit window [{a}, {b}] must be positive and nonempty")));
    }
    let inside: Vec<(f64, f64)> = series.iter().copied().filter(|(t, _)| *t >= a && *t <= b).collect();
    if inside.len() < MIN_FIT_SAMPLES {
        return Err(Error::Fit(format!(
            "{} samples in [{a}, {b}], need at least {MIN_FIT_SAMPLES}",
            inside.len()
        )));
    }
    if let Some((t, v)) = inside.iter().find(|(_, v)| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::Fit(format!("value {v} at t = {t} is not positive")));
    }
    let lx: Vec<f64> = inside.iter().map(|(t, _)| t.ln()).collect();
    let ly: Vec<f64> = inside.iter().map(|(_, v)| v.ln()).collect();
    let fit = linear_fit(&lx, &ly)?;
    Ok(FitResult {
        exponent: fit.slope,
        prefactor: fit.intercept.exp(),
        window,
        r_squared: fit.r_squared,
        samples: inside.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        (1..=200).map(|i| i as f64 * 0.5).map(|t| (t, f(t))).collect()
    }

    #[test]
    fn exact_power_law() {
        let r = fit_power_law(&series(|t| 3.0 * t * t), (5.0, 50.0)).unwrap();
        assert!((r.exponent - 2.0).abs() < 1e-12);
        assert!((r.prefactor - 3.0).abs() < 1e-10);
        assert!((r.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(r.samples, 91);
    }

    #[test]
    fn perturbed_power_law() {
        let r = fit_power_law(&series(|t| t * t * (1.0 + 0.01 * t.sin())), (5.0, 100.0)).unwrap();
        assert!((1.99..=2.01).contains(&r.exponent), "{}", r.exponent);
    }

    #[test]
    fn constant_series() {
        let r = fit_power_law(&series(|_| 4.0), (1.0, 100.0)).unwrap();
        assert!(r.exponent.abs() < 1e-12);
        assert_eq!(r.r_squared, 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(fit_power_law(&series(|t| t - 10.0), (1.0, 100.0)), Err(Error::Fit(_))));
        assert!(fit_power_law(&series(|t| t), (10.0, 12.0)).is_err());
        assert!(fit_power_law(&series(|t| t), (0.0, 12.0)).is_err());
        assert!(linear_fit(&[1.0, 1.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn linear_fit_recovers_line() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v| 0.5 * v - 1.0).collect();
        let f = linear_fit(&x, &y).unwrap();
        assert!((f.slope - 0.5).abs() < 1e-14 && (f.intercept + 1.0).abs() < 1e-14);
    }
}
