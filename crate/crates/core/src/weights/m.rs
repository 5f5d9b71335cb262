use super::classify::{in_s_t, s_t_entry_time};
use super::params::WeightParams;
use crate::quad::integrate_with_breaks;

/// Truncation `j_max` of the sup over `j` at time `t`.
pub fn j_cap(t: f64, k: i64, p: &WeightParams) -> i64 {
    match p.j_max {
        Some(n) => n as i64,
        None => (4 * (k.abs() + (t * t).ceil() as i64)).clamp(1, 10_000),
    }
}

#[inline]
fn term(gain: f64, t: f64, k: i64, eta: f64, j: i64) -> f64 {
    let s = eta / j as f64 - t;
    let d = (k - j) as f64;
    let w = 1.0 + d * d;
    gain / ((1.0 + s * s) * w * w.sqrt())
}

/// `∂_t m / m = sup_{0<|j|≤j_max} gain/(1+(η/j − t)²) ⟨k−j⟩^{−3}` on `S_t`, zero elsewhere.
///
/// The sup is exact over the truncated range: after the candidates near `j = k` and
/// `j ≈ η/t`, the scan outward from `k` stops once `gain ⟨d⟩^{−3}` cannot beat the best.
pub fn dt_log_m(t: f64, k: i64, eta: f64, p: &WeightParams) -> f64 {
    rate_and_argmax(t, k, eta, p).0
}

/// The rate and the maximizing `j` (0 off `S_t`).
fn rate_and_argmax(t: f64, k: i64, eta: f64, p: &WeightParams) -> (f64, i64) {
    if !in_s_t(t, k, eta) {
        return (0.0, 0);
    }
    let cap = j_cap(t, k, p);
    let gain = p.m_gain;
    let mut best = (0.0f64, 0i64);
    let consider = |j: i64, best: &mut (f64, i64)| {
        if j != 0 && j.abs() <= cap {
            let v = term(gain, t, k, eta, j);
            if v > best.0 {
                *best = (v, j);
            }
        }
    };
    if t > 0.0 {
        let r = eta / t;
        if r.abs() < 1e15 {
            let jr = r.round() as i64;
            for j in jr - 1..=jr + 1 {
                consider(j, &mut best);
            }
        }
    }
    let mut d: i64 = 0;
    loop {
        let dd = d as f64;
        let w = 1.0 + dd * dd;
        if gain / (w * w.sqrt()) <= best.0 {
            break;
        }
        if d > cap + k.abs() {
            break;
        }
        consider(k - d, &mut best);
        if d > 0 {
            consider(k + d, &mut best);
        }
        d += 1;
    }
    best
}

/// Times in `[a, b]` where the maximizing `j` changes, located by bisection between
/// samples with different argmax. The rate has a kink there.
fn switch_times(a: f64, b: f64, k: i64, eta: f64, p: &WeightParams) -> Vec<f64> {
    const SAMPLES: usize = 16;
    let arg = |t: f64| rate_and_argmax(t, k, eta, p).1;
    let mut out = Vec::new();
    let (mut lo, mut j_lo) = (a, arg(a));
    for i in 1..=SAMPLES {
        let hi = a + (b - a) * i as f64 / SAMPLES as f64;
        let j_hi = arg(hi);
        if j_hi != j_lo {
            let (mut l, mut h) = (lo, hi);
            while h - l > 1e-11 * h.max(1.0) {
                let m = 0.5 * (l + h);
                if arg(m) == j_lo {
                    l = m;
                } else {
                    h = m;
                }
            }
            out.push(0.5 * (l + h));
        }
        (lo, j_lo) = (hi, j_hi);
    }
    out
}

/// `log m(t₁) − log m(t₀)` by adaptive quadrature on unit panels.
///
/// The default cap `4(|k| + ⌈t²⌉)` only binds while `|η|/t > 4t²`, i.e. for `t < 2.5`
/// inside `S_t`, so its jumps at `t = √n`, `n ≤ 6`, are the only rate discontinuities.
/// Kinks where the maximizing `j` switches are passed to the quadrature as breakpoints.
pub fn log_m_between(t0: f64, t1: f64, k: i64, eta: f64, p: &WeightParams) -> f64 {
    let start = t0.max(s_t_entry_time(k, eta));
    if t1 <= start {
        return 0.0;
    }
    let jumps: Vec<f64> = if p.j_max.is_none() { (1..=6).map(|n| (n as f64).sqrt()).collect() } else { Vec::new() };
    let mut acc = 0.0;
    let mut a = start;
    while a < t1 {
        let b = (a + 1.0).min(t1);
        let mut breaks = switch_times(a, b, k, eta, p);
        breaks.extend(jumps.iter().copied());
        acc += integrate_with_breaks(|tau| dt_log_m(tau, k, eta, p), a, b, &breaks, 1e-12 * (b - a)).value;
        a = b;
    }
    acc
}

/// `log m(t,k,η)` with `m(0) = 1`.
pub fn log_m(t: f64, k: i64, eta: f64, p: &WeightParams) -> f64 {
    log_m_between(0.0, t, k, eta, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_rate(t: f64, k: i64, eta: f64, p: &WeightParams) -> f64 {
        if !in_s_t(t, k, eta) {
            return 0.0;
        }
        let cap = j_cap(t, k, p);
        (-cap..=cap)
            .filter(|&j| j != 0)
            .map(|j| term(p.m_gain, t, k, eta, j))
            .fold(0.0, f64::max)
    }

    #[test]
    fn sup_matches_exhaustive_scan() {
        let p = WeightParams::default();
        for k in -7..=7 {
            for e in -30..=30 {
                let eta = e as f64 * 1.3;
                for i in 0..40 {
                    let t = i as f64 * 0.37;
                    let a = dt_log_m(t, k, eta, &p);
                    let b = brute_rate(t, k, eta, &p);
                    assert!((a - b).abs() <= 1e-15 * b.max(1.0), "{t} {k} {eta}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn unity_at_time_zero() {
        let p = WeightParams::default();
        assert_eq!(log_m(0.0, 3, 7.0, &p), 0.0);
        assert_eq!(log_m(0.0, 0, 0.0, &p), 0.0);
    }

    #[test]
    fn truncation_refinement() {
        let p50 = WeightParams {
            j_max: Some(50),
            ..Default::default()
        };
        let p500 = WeightParams {
            j_max: Some(500),
            ..Default::default()
        };
        let a = log_m(10.0, 1, 5.0, &p50);
        let b = log_m(10.0, 1, 5.0, &p500);
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn additive_over_subintervals() {
        let p = WeightParams::default();
        let whole = log_m(20.0, 2, 9.0, &p);
        let split = log_m(7.5, 2, 9.0, &p) + log_m_between(7.5, 20.0, 2, 9.0, &p);
        assert!((whole - split).abs() < 1e-10);
    }
}
