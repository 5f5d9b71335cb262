//! Scalar helpers for checking weight comparison estimates numerically.

use serde::Serialize;

use super::params::WeightParams;
use super::resonance::resonance_layout;

/// Case of the `J(t,k,η)/J(t,l,ξ)` comparison, by membership of `t` in the critical intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum A3Case {
    /// Always applicable; carries the `1_{I_{l,ξ}}` correction.
    I,
    /// `t ∈ Ĩ_{k,η} ∖ Ĩ_{l,ξ}`.
    II,
    /// `t ∈ Ĩ_{l,ξ} ∖ Ĩ_{k,η}`.
    III,
    /// `t ∈ Ĩ_{k,η} ∩ Ĩ_{l,ξ}`.
    IV,
    /// `t` outside both.
    V,
}

impl A3Case {
    /// The membership case of `(t, (k,η), (l,ξ))`; never returns [`A3Case::I`].
    pub fn of(t: f64, k: i64, eta: f64, l: i64, xi: f64) -> A3Case {
        let in_k = in_itilde(t, k, eta);
        let in_l = in_itilde(t, l, xi);
        match (in_k, in_l) {
            (true, false) => A3Case::II,
            (false, true) => A3Case::III,
            (true, true) => A3Case::IV,
            (false, false) => A3Case::V,
        }
    }
}

fn in_itilde(t: f64, k: i64, eta: f64) -> bool {
    resonance_layout(k, eta).is_some_and(|l| l.itilde().contains(t))
}

fn in_i(t: f64, k: i64, eta: f64) -> bool {
    resonance_layout(k, eta).is_some_and(|l| l.i().contains(t))
}

/// `½ log(|η|/|k|³) − ½ log(1 + |t − η/k|)`.
fn half_peak(t: f64, k: i64, eta: f64) -> f64 {
    let kf = k as f64;
    0.5 * (eta.abs() / kf.abs().powi(3)).ln() - 0.5 * (t - eta / kf).abs().ln_1p()
}

/// Logarithm of the right-hand side (constant 1) of the selected case.
pub fn lemma_a3_bound(case: A3Case, t: f64, k: i64, eta: f64, l: i64, xi: f64, p: &WeightParams) -> f64 {
    let tail = 10.0 * p.rho * ((k - l) as f64).hypot(eta - xi).cbrt();
    let prefactor = match case {
        A3Case::I => {
            if in_i(t, l, xi) {
                half_peak(t, l, xi).exp().ln_1p()
            } else {
                0.0
            }
        }
        A3Case::II => -half_peak(t, k, eta),
        A3Case::III => half_peak(t, l, xi),
        A3Case::IV => half_peak(t, l, xi) - half_peak(t, k, eta),
        A3Case::V => 0.0,
    };
    prefactor + tail
}

/// `|x^s − y^s| (x^{1−s} + y^{1−s}) / |x − y|`; bounded for `x ≥ y ≥ 0`, `x ≠ y`.
pub fn useest_i_ratio(x: f64, y: f64, s: f64) -> f64 {
    (x.powf(s) - y.powf(s)).abs() * (x.powf(1.0 - s) + y.powf(1.0 - s)) / (x - y).abs()
}

/// `|x^s − y^s| ≤ s (K−1)^{s−1} |x − y|^s` whenever `|x − y| ≤ x/K`, `K > 1`.
pub fn useest_ii_holds(x: f64, y: f64, s: f64, big_k: f64) -> bool {
    let lhs = (x.powf(s) - y.powf(s)).abs();
    let rhs = s * (big_k - 1.0).powf(s - 1.0) * (x - y).abs().powf(s);
    lhs <= rhs * (1.0 + 1e-12) + 1e-300
}

/// `(x+y)^s ≤ (x/(x+y))^{1−s} (x^s + y^s)` and, if `y ≤ x ≤ K y`,
/// `(x+y)^s ≤ (K/(1+K))^{1−s} (x^s + y^s)`.
pub fn useest_iii_holds(x: f64, y: f64, s: f64, big_k: Option<f64>) -> bool {
    let lhs = (x + y).powf(s);
    let sum = x.powf(s) + y.powf(s);
    let tol = 1.0 + 1e-12;
    let general = lhs <= (x / (x + y)).powf(1.0 - s) * sum * tol;
    let special = match big_k {
        Some(kk) if y <= x && x <= kk * y => lhs <= (kk / (1.0 + kk)).powf(1.0 - s) * sum * tol,
        _ => true,
    };
    general && special
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_selection() {
        // Ĩ_{1,100} = [50, 150], Ĩ_{2,100} = [43.75, 56.25]
        assert_eq!(A3Case::of(100.0, 1, 100.0, 2, 100.0), A3Case::II);
        assert_eq!(A3Case::of(45.0, 1, 100.0, 2, 100.0), A3Case::III);
        assert_eq!(A3Case::of(52.0, 1, 100.0, 2, 100.0), A3Case::IV);
        assert_eq!(A3Case::of(10.0, 1, 100.0, 2, 100.0), A3Case::V);
    }

    #[test]
    fn scalar_inequalities_spot_checks() {
        assert!(useest_ii_holds(10.0, 9.0, 0.5, 10.0));
        assert!(useest_iii_holds(1.0, 1.0, 0.5, Some(1.0)));
        assert!(useest_iii_holds(3.0, 0.0, 0.7, None));
        let r = useest_i_ratio(4.0, 1.0, 0.5);
        assert!((r - 1.0 * 3.0 / 3.0).abs() < 1e-15);
    }
}
