use serde::Serialize;

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, t: f64) -> bool {
        self.lo <= t && t <= self.hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }
}

/// Critical-time geometry of a resonant pair `(k,η)` with `ηk > 0`, `1 ≤ |k| ≤ |η|^{1/3}`.
///
/// Negative pairs are stored through `(|k|, |η|)`; all times are positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonanceLayout {
    pub k: i64,
    pub eta: f64,
    pub t_minus: f64,
    pub t_plus: f64,
    pub i_left: Interval,
    pub i_right: Interval,
    pub itilde_left: Interval,
    pub itilde_right: Interval,
    pub a: f64,
}

impl ResonanceLayout {
    /// Critical time `η/k`.
    pub fn t_crit(&self) -> f64 {
        self.eta / self.k as f64
    }

    /// `I = I^L ∪ I^R`.
    pub fn i(&self) -> Interval {
        Interval {
            lo: self.i_left.lo,
            hi: self.i_right.hi,
        }
    }

    /// `Ĩ = [t⁻, t⁺]`.
    pub fn itilde(&self) -> Interval {
        Interval {
            lo: self.t_minus,
            hi: self.t_plus,
        }
    }
}

/// `true` iff `1 ≤ k` and `k³ ≤ η` (integer comparison in floating point).
pub(crate) fn eligible(k: i64, eta: f64) -> bool {
    k >= 1 && ((k * k * k) as f64) <= eta
}

/// The resonant `k` with `t ∈ I_{k,η}`, if any.
pub fn resonant_k(t: f64, eta: f64) -> Option<i64> {
    let e = eta.abs();
    if e <= 1.0 || t <= 0.0 {
        return None;
    }
    let mut k = 1;
    while eligible(k, e) {
        let l = resonance_layout(k, e)?;
        if l.i().contains(t) {
            return Some(k * eta.signum() as i64);
        }
        k += 1;
    }
    None
}

/// Builds the layout; `None` unless `ηk > 0` and `1 ≤ |k| ≤ |η|^{1/3}`.
pub fn resonance_layout(k: i64, eta: f64) -> Option<ResonanceLayout> {
    if k == 0 || !(eta * k as f64 > 0.0) {
        return None;
    }
    let (ka, e) = (k.abs(), eta.abs());
    if !eligible(ka, e) {
        return None;
    }
    let kf = ka as f64;
    let tc = e / kf;
    let half = e / (2.0 * kf * kf * kf);
    let (lo, hi) = if ka == 1 {
        (e / 3.0, 2.0 * e)
    } else {
        (0.5 * (tc + e / (kf + 1.0)), 0.5 * (tc + e / (kf - 1.0)))
    };
    Some(ResonanceLayout {
        k,
        eta,
        t_minus: tc - half,
        t_plus: tc + half,
        i_left: Interval { lo, hi: tc },
        i_right: Interval { lo: tc, hi },
        itilde_left: Interval { lo: tc - half, hi: tc },
        itilde_right: Interval { lo: tc, hi: tc + half },
        a: 4.0 * (1.0 - 0.5 * kf * kf * kf / e),
    })
}
