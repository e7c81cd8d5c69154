use super::{Equilibrium, EquilibriumKind};
use crate::circulation::Circulations;
use crate::error::{Result, VortexError};
use crate::reduction::ReducedState;
use crate::symmetric_invariants;

fn check_gamma2(c: &Circulations) -> Result<f64> {
    let g = symmetric_invariants(c);
    let [a, b, d] = c.as_array();
    let scale = (a * b).abs() + (a * d).abs() + (b * d).abs();
    if g.gamma2.abs() <= 1e-14 * scale {
        return Err(VortexError::AtInfinity(format!("γ₂ = 0 for circulations {c}; the equilateral points diverge")));
    }
    Ok(g.gamma2)
}

/// The two equilateral points `Y ≷ 0`, in that order.
pub fn equilateral_equilibria(c: &Circulations, theta: f64) -> Result<[ReducedState; 2]> {
    let gamma2 = check_gamma2(c)?;
    let g = symmetric_invariants(c);
    let [g1, g2, g3] = c.as_array();
    let s = g1 + g2;
    if s == 0.0 {
        return Err(VortexError::RelabelRequired(crate::reduction::suggest_labeling(c)));
    }
    let f = theta / gamma2;
    let x = f * (g1 - g2) * g.gamma1 / (2.0 * s);
    let y = f * 3f64.sqrt() * g.gamma1 / 2.0;
    let z = f * (g1 * g2 - (g1 * g1 + g2 * g2) * g3 / s);
    Ok([ReducedState::new(x, y, z, theta, c.clone()), ReducedState::new(x, -y, z, theta, c.clone())])
}

/// `λ² = −3γ₂³/(Θ²γ₁²)` at the equilateral points.
pub fn equilateral_eigenvalue_sq(c: &Circulations, theta: f64) -> Result<f64> {
    let gamma2 = check_gamma2(c)?;
    let g = symmetric_invariants(c);
    Ok(-3.0 * gamma2.powi(3) / (theta * theta * g.gamma1 * g.gamma1))
}

/// Both equilateral equilibria with their linearization.
pub fn tri_stability(c: &Circulations, theta: f64) -> Result<[Equilibrium; 2]> {
    if theta == 0.0 {
        return Err(VortexError::Precondition("Θ = 0 places both equilateral points at the origin".into()));
    }
    let [p, m] = equilateral_equilibria(c, theta)?;
    Ok([Equilibrium::at(p, EquilibriumKind::Equilateral)?, Equilibrium::at(m, EquilibriumKind::Equilateral)?])
}
