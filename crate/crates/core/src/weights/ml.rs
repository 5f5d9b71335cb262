use super::multipliers::japanese;
use super::params::WeightParams;

fn activation_time(k: i64, eta: f64) -> f64 {
    let r = (k as f64).hypot(eta) / 10.0;
    (r * r - 1.0).max(0.0).sqrt()
}

/// `log m_L(t,k,η) = −N log⟨k,η⟩ + ∫₀ᵗ 5/(1+(τ−η/k)²) 1_{|k,η| ≤ 10⟨τ⟩} dτ`;
/// the growth term is absent for `k = 0`.
pub fn log_ml(t: f64, k: i64, eta: f64, p: &WeightParams) -> f64 {
    let base = -p.n * japanese(k as f64, eta).ln();
    if k == 0 {
        return base;
    }
    let ts = activation_time(k, eta);
    if t <= ts {
        return base;
    }
    let c = eta / k as f64;
    base + 5.0 * ((t - c).atan() - (ts - c).atan())
}

/// `∂_t m_L / m_L`.
pub fn dt_log_ml(t: f64, k: i64, eta: f64) -> f64 {
    if k == 0 || t < activation_time(k, eta) {
        return 0.0;
    }
    let s = t - eta / k as f64;
    5.0 / (1.0 + s * s)
}
