//! Sampled sweeps of the multiplier lemmas, shared by the lemma tests and the acceptance run.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::sync::OnceLock;

use shearmhd::weights::{
    dq_ratio, lemma_a3_bound, log_j, log_m_between, log_q, q_breakpoints, resonance_layout, useest_i_ratio,
    useest_ii_holds, useest_iii_holds, A3Case, WeightParams,
};

/// Range of `dq_ratio · (1 + |t − η/k|)` over `t ∈ Ĩ_{k,η}` in [`dq_concentration`].
pub const DQ_CONCENTRATION: (f64, f64) = (0.050002, 219.1345);
/// Largest `log(LHS/RHS)` per case (i to v) in [`a3_sweep`].
pub const A3_MAX_LOG_RATIO: [f64; 5] = [3.586172, 3.618038, 2.409411, 1.903882, 3.253693];
/// Largest `useest_i_ratio` over [`b1_triples`].
pub const B1_I_CONSTANT: f64 = 1.97996;

/// `log(e^{π³/6})`.
pub fn m_cap() -> f64 {
    PI.powi(3) / 6.0
}

/// Outcome of [`m_sweep`].
#[derive(Debug, Clone, Copy)]
pub struct MSweep {
    pub samples: usize,
    pub max_log_m: f64,
    pub min_log_m: f64,
    /// `(t, k, η)` of the largest value.
    pub argmax: (f64, i64, f64),
    /// Sampled intervals on which `m` decreased.
    pub decreasing: usize,
}

/// 10⁵ samples of `log m` with `t ∈ [0, 100]`, `|k| ≤ 32`, `|η| ≤ 128`, ten times per frequency.
/// Computed once per test binary.
pub fn m_sweep() -> MSweep {
    static CACHE: OnceLock<MSweep> = OnceLock::new();
    *CACHE.get_or_init(compute_m_sweep)
}

fn compute_m_sweep() -> MSweep {
    let p = WeightParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut out = MSweep {
        samples: 0,
        max_log_m: 0.0,
        min_log_m: 0.0,
        argmax: (0.0, 0, 0.0),
        decreasing: 0,
    };
    while out.samples < 100_000 {
        let k = rng.random_range(-32i64..=32);
        let eta = rng.random_range(-128.0..=128.0);
        let mut times: Vec<f64> = (0..10).map(|_| rng.random_range(0.0..=100.0)).collect();
        times.sort_by(f64::total_cmp);
        let (mut t_prev, mut lm) = (0.0, 0.0);
        for t in times {
            let inc = log_m_between(t_prev, t, k, eta, &p);
            if inc < 0.0 {
                out.decreasing += 1;
            }
            lm += inc;
            t_prev = t;
            out.min_log_m = out.min_log_m.min(lm);
            if lm > out.max_log_m {
                out.max_log_m = lm;
                out.argmax = (t, k, eta);
            }
            out.samples += 1;
        }
    }
    out
}

/// Largest `|log q(b⁺) − log q(b⁻)|` over the breakpoints `b` of `±η` and `1 ≤ k ≤ ⌊η^{1/3}⌋ + 1`.
/// One-sided limits are linear extrapolations from `b ± δ` and `b ± 2δ`, so slopes cancel.
pub fn q_jump(eta: f64) -> f64 {
    let p = WeightParams::default();
    let k_top = eta.cbrt().floor() as i64 + 1;
    let mut worst = 0.0f64;
    for sign in [1i64, -1] {
        let e = sign as f64 * eta;
        for bp in q_breakpoints(eta) {
            let d = 1e-11 * bp.max(1.0);
            for k in 1..=k_top {
                let q = |t: f64| log_q(t, sign * k, e, &p);
                let right = 2.0 * q(bp + d) - q(bp + 2.0 * d);
                let left = 2.0 * q(bp - d) - q(bp - 2.0 * d);
                worst = worst.max((right - left).abs());
            }
        }
    }
    worst
}

/// Range of `dq_ratio · (1 + |t − η/k|)` on the open intervals `Ĩ_{k,η}`,
/// `η ∈ {50, 500, 5000, 50000}`, `1 ≤ k ≤ η^{1/3}`, 400 times each.
pub fn dq_concentration() -> (f64, f64) {
    let p = WeightParams::default();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for eta in [50.0f64, 500.0, 5000.0, 50000.0] {
        for k in 1..=eta.cbrt().floor() as i64 {
            let Some(layout) = resonance_layout(k, eta) else { continue };
            let iv = layout.itilde();
            let n = 400;
            for i in 0..n {
                let t = iv.lo + iv.len() * (i as f64 + 0.5) / n as f64;
                let r = dq_ratio(t, k, eta, &p) * (1.0 + (t - eta / k as f64).abs());
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
    }
    (lo, hi)
}

fn case_index(c: A3Case) -> usize {
    match c {
        A3Case::I => 0,
        A3Case::II => 1,
        A3Case::III => 2,
        A3Case::IV => 3,
        A3Case::V => 4,
    }
}

/// `(max log(LHS/RHS), samples)` per case over 10⁴ pairs near resonance; case i is
/// evaluated on every sample, the membership case on each sample as well.
pub fn a3_sweep() -> [(f64, usize); 5] {
    let p = WeightParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut out = [(f64::NEG_INFINITY, 0usize); 5];
    for _ in 0..10_000 {
        let eta: f64 = rng.random_range(8.0..2000.0);
        let k = rng.random_range(1..=eta.cbrt().floor() as i64);
        let mut l = k + rng.random_range(-2i64..=2);
        if l == 0 {
            l = 1;
        }
        let xi = eta + rng.random_range(-50.0..50.0);
        let t = match rng.random_range(0..3) {
            0 => rng.random_range(0.0..2.0 * eta),
            1 => {
                let iv = resonance_layout(k, eta).expect("resonant pair").itilde();
                rng.random_range(iv.lo..=iv.hi)
            }
            _ => {
                let c = xi / l as f64;
                (c + rng.random_range(-0.5..0.5) * c / (l * l) as f64).max(0.0)
            }
        };
        let lhs = log_j(t, k, eta, &p) - log_j(t, l, xi, &p);
        for case in [A3Case::I, A3Case::of(t, k, eta, l, xi)] {
            let slot = &mut out[case_index(case)];
            slot.0 = slot.0.max(lhs - lemma_a3_bound(case, t, k, eta, l, xi, &p));
            slot.1 += 1;
        }
    }
    out
}

/// Outcome of [`b1_triples`].
#[derive(Debug, Clone, Copy)]
pub struct B1Sweep {
    pub max_i_ratio: f64,
    pub fail_ii: usize,
    pub fail_iii: usize,
}

/// 10⁵ random `(x, y, s)` triples for the three scalar estimates.
pub fn b1_triples() -> B1Sweep {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut out = B1Sweep {
        max_i_ratio: 0.0,
        fail_ii: 0,
        fail_iii: 0,
    };
    for _ in 0..100_000 {
        let s: f64 = rng.random_range(0.01..0.99);
        let x = 10f64.powf(rng.random_range(-3.0..3.0));
        let y = x * rng.random_range(0.0..1.0);
        if x != y {
            out.max_i_ratio = out.max_i_ratio.max(useest_i_ratio(x, y, s));
        }
        let big_k: f64 = rng.random_range(1.01..20.0);
        let y2 = x + rng.random_range(-1.0..1.0) * x / big_k;
        if !useest_ii_holds(x, y2, s, big_k) {
            out.fail_ii += 1;
        }
        let y3 = x / rng.random_range(1.0..big_k);
        if !useest_iii_holds(x, y, s, None) || !useest_iii_holds(x, y3, s, Some(big_k)) {
            out.fail_iii += 1;
        }
    }
    out
}

/// A measured maximum may exceed its fixture by at most 10%.
pub fn within_fixture(log_value: f64, log_fixture: f64) -> bool {
    log_value <= log_fixture + 1.1f64.ln()
}
