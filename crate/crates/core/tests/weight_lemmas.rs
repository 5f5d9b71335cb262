//! Sampled checks of the multiplier lemmas. Fitted constants are pinned as fixtures in `support`.

mod support;

use proptest::prelude::*;

use shearmhd::weights::{log_m_between, log_q, useest_i_ratio, WeightParams};
use support::*;

#[test]
fn m_is_nondecreasing_and_at_least_one() {
    let s = m_sweep();
    assert_eq!(s.samples, 100_000);
    assert_eq!(s.decreasing, 0);
    assert!(s.min_log_m >= 0.0);
}

#[test]
fn m_stays_below_stated_cap() {
    let s = m_sweep();
    println!("max log m = {:.4} at (t, k, eta) = {:?}; cap = {:.4}", s.max_log_m, s.argmax, m_cap());
    assert!(s.max_log_m <= m_cap(), "log m = {} exceeds pi^3/6 at {:?}", s.max_log_m, s.argmax);
}

#[test]
fn q_is_continuous_at_breakpoints() {
    for eta in [50.0, 500.0, 5000.0] {
        let jump = q_jump(eta);
        assert!(jump <= 1e-8, "eta = {eta}: jump {jump}");
    }
}

#[test]
fn dq_ratio_concentrates_on_resonant_intervals() {
    let (lo, hi) = dq_concentration();
    println!("dq_ratio * (1 + |t - eta/k|) in [{lo:.6}, {hi:.6}]");
    assert!(lo > 0.0 && hi.is_finite());
    let (c1, c2) = DQ_CONCENTRATION;
    assert!(lo >= c1 / 1.1 && hi <= c2 * 1.1, "[{lo}, {hi}] outside fixture [{c1}, {c2}]");
}

#[test]
fn j_ratio_cases_stay_bounded() {
    let sweep = a3_sweep();
    for (i, (max, count)) in sweep.iter().enumerate() {
        println!("case {}: {count} samples, max log(LHS/RHS) = {max:.6}", i + 1);
    }
    for (i, (max, count)) in sweep.iter().enumerate() {
        assert!(*count > 0, "case {} never sampled", i + 1);
        assert!(within_fixture(*max, A3_MAX_LOG_RATIO[i]), "case {}: {max} vs fixture {}", i + 1, A3_MAX_LOG_RATIO[i]);
    }
}

#[test]
fn scalar_inequalities_hold_on_random_triples() {
    let b = b1_triples();
    println!("max |x^s - y^s|(x^(1-s) + y^(1-s))/|x - y| = {:.6}", b.max_i_ratio);
    assert_eq!(b.fail_ii, 0);
    assert_eq!(b.fail_iii, 0);
    assert!(b.max_i_ratio <= B1_I_CONSTANT * 1.1, "{} vs fixture {B1_I_CONSTANT}", b.max_i_ratio);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn useest_i_ratio_is_bounded_by_two(s in 0.01f64..0.99, x in 1e-3f64..1e3, f in 0.0f64..0.999) {
        prop_assert!(useest_i_ratio(x, x * f, s) <= 2.0);
    }

    #[test]
    fn q_is_symmetric_under_reflection(t in 0.0f64..400.0, k in 1i64..8, eta in 2.0f64..500.0) {
        let p = WeightParams::default();
        prop_assert_eq!(log_q(t, k, eta, &p), log_q(t, -k, -eta, &p));
    }

    #[test]
    fn m_increments_are_additive(
        t0 in 0.0f64..50.0,
        dt1 in 0.0f64..20.0,
        dt2 in 0.0f64..20.0,
        k in -8i64..8,
        eta in -64.0f64..64.0,
    ) {
        let p = WeightParams::default();
        let (t1, t2) = (t0 + dt1, t0 + dt1 + dt2);
        let whole = log_m_between(t0, t2, k, eta, &p);
        let parts = log_m_between(t0, t1, k, eta, &p) + log_m_between(t1, t2, k, eta, &p);
        prop_assert!((whole - parts).abs() <= 1e-9 * (1.0 + whole.abs()));
    }
}
