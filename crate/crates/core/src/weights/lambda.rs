use super::params::WeightParams;
use crate::quad::integrate;

/// `∂_t λ = −ρ0 ⟨t⟩^{−(1+γ*)}`.
pub fn dt_lambda(t: f64, p: &WeightParams) -> f64 {
    -p.rho0 * (1.0 + t * t).powf(-0.5 * (1.0 + p.gamma))
}

/// `λ(t) = λ0 − ρ0 ∫₀ᵗ ⟨τ⟩^{−(1+γ*)} dτ`, by adaptive quadrature to absolute error 1e−12.
pub fn lambda_at(t: f64, p: &WeightParams) -> f64 {
    let e = -0.5 * (1.0 + p.gamma);
    let q = integrate(|tau| (1.0 + tau * tau).powf(e), 0.0, t, 1e-12);
    p.lambda0 - p.rho0 * q.value
}
