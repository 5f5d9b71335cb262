use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Moving-frame Fourier symbols with `Δ_t = ∂_x² + (∂_y − t∂_x)²` and `∇_t = (∂_x, ∂_y − t∂_x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MovingSymbol {
    LaplacianT,
    InvLaplacianT,
    GradTx,
    GradTy,
    LambdaT,
    InvLambdaT,
}

/// `p = k² + (η − kt)²`, the negated symbol of `Δ_t`.
#[inline(always)]
pub fn p_symbol(k: f64, eta: f64, t: f64) -> f64 {
    let s = eta - k * t;
    k * k + s * s
}

/// Evaluates a moving-frame symbol at `(k, η, t)`.
pub fn moving_symbol(kind: MovingSymbol, k: i64, eta: f64, t: f64) -> Result<Complex64> {
    let kf = k as f64;
    let p = p_symbol(kf, eta, t);
    let singular = || Error::Domain(format!("{kind:?} is singular at (k, η) = ({k}, {eta})"));
    Ok(match kind {
        MovingSymbol::LaplacianT => Complex64::new(-p, 0.0),
        MovingSymbol::InvLaplacianT => {
            if p == 0.0 {
                return Err(singular());
            }
            Complex64::new(-1.0 / p, 0.0)
        }
        MovingSymbol::GradTx => Complex64::new(0.0, kf),
        MovingSymbol::GradTy => Complex64::new(0.0, eta - kf * t),
        MovingSymbol::LambdaT => Complex64::new(p.sqrt(), 0.0),
        MovingSymbol::InvLambdaT => {
            if p == 0.0 {
                return Err(singular());
            }
            Complex64::new(1.0 / p.sqrt(), 0.0)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplacian_values() {
        assert_eq!(moving_symbol(MovingSymbol::LaplacianT, 2, 3.0, 1.0).unwrap().re, -5.0);
        assert_eq!(moving_symbol(MovingSymbol::LaplacianT, 3, 4.0, 0.0).unwrap().re, -25.0);
        let inv = moving_symbol(MovingSymbol::InvLaplacianT, 1, 7.5, 7.5).unwrap();
        assert_eq!(inv.re, -1.0);
    }

    #[test]
    fn inverse_at_origin_is_domain_error() {
        assert!(moving_symbol(MovingSymbol::InvLaplacianT, 0, 0.0, 3.0).is_err());
        assert!(moving_symbol(MovingSymbol::InvLambdaT, 0, 0.0, 0.0).is_err());
    }

    #[test]
    fn gradient_components() {
        let gx = moving_symbol(MovingSymbol::GradTx, 3, 1.0, 2.0).unwrap();
        let gy = moving_symbol(MovingSymbol::GradTy, 3, 1.0, 2.0).unwrap();
        assert_eq!(gx, Complex64::new(0.0, 3.0));
        assert_eq!(gy, Complex64::new(0.0, -5.0));
        let lap = moving_symbol(MovingSymbol::LaplacianT, 3, 1.0, 2.0).unwrap();
        assert_eq!(gx * gx + gy * gy, lap);
    }
}
