use super::lambda::lambda_at;
use super::m::log_m;
use super::params::WeightParams;
use super::q::log_q;

/// `⟨k,η⟩ = (1 + k² + η²)^{1/2}`.
pub fn japanese(k: f64, eta: f64) -> f64 {
    (1.0 + k * k + eta * eta).sqrt()
}

/// `log(eᵃ + eᵇ)` without overflow.
pub fn logaddexp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

fn log_jt_from(eta: f64, log_q: f64, p: &WeightParams) -> f64 {
    8.0 * p.rho * eta.abs().cbrt() - log_q
}

fn log_j_from(k: i64, log_jt: f64, p: &WeightParams) -> f64 {
    logaddexp(log_jt, 8.0 * p.rho * (k.abs() as f64).cbrt())
}

/// `log J̃ = 8ρ|η|^{1/3} − log q`.
pub fn log_jt(t: f64, k: i64, eta: f64, p: &WeightParams) -> f64 {
    log_jt_from(eta, log_q(t, k, eta, p), p)
}

/// `log J = log(J̃ + e^{8ρ|k|^{1/3}})`.
pub fn log_j(t: f64, k: i64, eta: f64, p: &WeightParams) -> f64 {
    log_j_from(k, log_jt(t, k, eta, p), p)
}

/// `(log A, log Ã)` from precomputed `λ(t)`, `log m` and `log q`.
pub fn log_a_parts(k: i64, eta: f64, lambda: f64, log_m: f64, log_q: f64, p: &WeightParams) -> (f64, f64) {
    let kf = k as f64;
    let common = p.n * japanese(kf, eta).ln() - log_m + lambda * (kf.abs() + eta.abs()).powf(p.s);
    let jt = log_jt_from(eta, log_q, p);
    let j = log_j_from(k, jt, p);
    (common + j, common + jt)
}

/// `log A = N log⟨k,η⟩ − log m + log J + λ(t)(|k|+|η|)^s`.
pub fn log_a(t: f64, k: i64, eta: f64, p: &WeightParams) -> f64 {
    log_a_parts(k, eta, lambda_at(t, p), log_m(t, k, eta, p), log_q(t, k, eta, p), p).0
}

/// `log Ã`, identical to [`log_a`] with `J̃` in place of `J`.
pub fn log_at(t: f64, k: i64, eta: f64, p: &WeightParams) -> f64 {
    log_a_parts(k, eta, lambda_at(t, p), log_m(t, k, eta, p), log_q(t, k, eta, p), p).1
}
