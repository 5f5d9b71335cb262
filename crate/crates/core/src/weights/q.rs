use super::params::WeightParams;
use super::resonance::eligible;

struct Piece {
    tc: f64,
    w: f64,
    a: f64,
    big_l: f64,
}

fn pieces(eta: f64) -> impl Iterator<Item = (i64, Piece)> {
    (1i64..).take_while(move |&j| eligible(j, eta)).map(move |j| {
        let j3 = (j * j * j) as f64;
        (
            j,
            Piece {
                tc: eta / j as f64,
                w: eta / (2.0 * j3),
                a: 4.0 * (1.0 - 0.5 * j3 / eta),
                big_l: (2.0 * eta / j3).ln(),
            },
        )
    })
}

fn reflect(k: i64, eta: f64) -> (i64, f64) {
    if eta < 0.0 {
        (-k, -eta)
    } else {
        (k, eta)
    }
}

/// `log q(t,k,η)`.
///
/// `q_NR` is the product over `j ≤ η^{1/3}` of one factor per critical interval: constant
/// before `t_j⁻`, `(1+a|t−η/j|)^{−ρ}` on `Ĩ^L_j`, `((j³/2η)(1+a|t−η/j|))^{ρ+½}` on `Ĩ^R_j`,
/// and 1 afterwards. On `Ĩ_{k,η}` the resonant factor `((k³/2η)(1+a|t−η/k|))^{−½}` is applied.
/// Negative `η` uses `(k,η) → (−k,−η)`; `q ≡ 1` for `|η| ≤ 1`.
pub fn log_q(t: f64, k: i64, eta: f64, p: &WeightParams) -> f64 {
    let (k, eta) = reflect(k, eta);
    if eta <= 1.0 {
        return 0.0;
    }
    let rho = p.rho;
    let mut acc = 0.0;
    for (j, pc) in pieces(eta) {
        let s = t - pc.tc;
        let g = if s <= -pc.w {
            (2.0 * rho + 0.5) * pc.big_l
        } else if s <= 0.0 {
            rho * (-pc.a * s).ln_1p() + (rho + 0.5) * pc.big_l
        } else if s < pc.w {
            (rho + 0.5) * (pc.big_l - (pc.a * s).ln_1p())
        } else {
            0.0
        };
        acc -= g;
        if j == k && s.abs() < pc.w {
            acc += 0.5 * (pc.big_l - (pc.a * s.abs()).ln_1p());
        }
    }
    acc
}

/// `∂_t q / q`, piecewise closed form (right derivative at breakpoints).
pub fn dq_ratio(t: f64, k: i64, eta: f64, p: &WeightParams) -> f64 {
    let (k, eta) = reflect(k, eta);
    if eta <= 1.0 {
        return 0.0;
    }
    let rho = p.rho;
    let mut acc = 0.0;
    for (j, pc) in pieces(eta) {
        let s = t - pc.tc;
        if s < -pc.w || s >= pc.w {
            continue;
        }
        let den = 1.0 + pc.a * s.abs();
        let resonant = j == k;
        acc += if s < 0.0 {
            (rho + if resonant { 0.5 } else { 0.0 }) * pc.a / den
        } else {
            (rho + if resonant { 0.0 } else { 0.5 }) * pc.a / den
        };
    }
    acc
}

/// All times where `log q(·,k,η)` changes formula: `t_j^±`, `η/j` and `2η`.
pub fn q_breakpoints(eta: f64) -> Vec<f64> {
    let e = eta.abs();
    if e <= 1.0 {
        return Vec::new();
    }
    let mut v: Vec<f64> = pieces(e).flat_map(|(_, pc)| [pc.tc - pc.w, pc.tc, pc.tc + pc.w]).collect();
    v.push(2.0 * e);
    v.sort_by(f64::total_cmp);
    v
}
