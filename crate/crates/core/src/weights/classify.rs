/// Paraproduct region of a frequency pair `((k,η),(l,ξ))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum PairClass {
    /// `|k−l, η−ξ| ≥ 8|l,ξ|`.
    Reaction,
    /// `8|k−l, η−ξ| ≤ |l,ξ|`.
    Transport,
    /// `⅛|l,ξ| ≤ |k−l, η−ξ| ≤ 8|l,ξ|`.
    Remainder,
}

/// Classifies a pair; boundary equalities go to [`PairClass::Remainder`].
pub fn classify_pair(k: i64, eta: f64, l: i64, xi: f64) -> PairClass {
    let hi = ((k - l) as f64).hypot(eta - xi);
    let lo = (l as f64).hypot(xi);
    if hi > 8.0 * lo {
        PairClass::Reaction
    } else if 8.0 * hi < lo {
        PairClass::Transport
    } else {
        PairClass::Remainder
    }
}

/// `(k,η) ∈ S_t ⇔ |k,η| ≤ 10t²`.
pub fn in_s_t(t: f64, k: i64, eta: f64) -> bool {
    (k as f64).hypot(eta) <= 10.0 * t * t
}

/// First time at which `(k,η)` enters `S_t`.
pub(crate) fn s_t_entry_time(k: i64, eta: f64) -> f64 {
    ((k as f64).hypot(eta) / 10.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_examples() {
        assert_eq!(classify_pair(10, 0.0, 1, 0.0), PairClass::Reaction);
        assert_eq!(classify_pair(10, 0.0, 10, -1.0), PairClass::Transport);
        assert!(in_s_t(1.0, 3, 4.0));
        assert!(!in_s_t(0.5, 3, 4.0));
    }

    #[test]
    fn boundaries_are_remainder() {
        assert_eq!(classify_pair(9, 0.0, 1, 0.0), PairClass::Remainder);
        assert_eq!(classify_pair(9, 0.0, 8, 0.0), PairClass::Remainder);
    }
}
