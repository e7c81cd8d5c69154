use serde::{Deserialize, Serialize};

use super::jacobi::kappas;
use super::ReducedState;
use crate::circulation::{symmetric_invariants, Circulations};
use crate::error::{Result, VortexError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SurfaceKind {
    Spheroid,
    Hyperboloid,
    Cone,
}

/// The level set `Θ² = Z² + (4γ₃/γ₁)(X²+Y²)` restricted to its physical part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSurface {
    pub kind: SurfaceKind,
    pub theta: f64,
    /// Sign of `Z` on the physical sheet (hyperboloid and cone only).
    pub z_sign: Option<f64>,
}

/// Surface type from the signs alone, without checking the sign of `Θ`.
pub fn surface_kind(c: &Circulations, theta: f64) -> Result<SurfaceKind> {
    let s = symmetric_invariants(c);
    let scale: f64 = c.as_array().iter().map(|g| g.abs()).sum();
    if s.gamma1.abs() <= 1e-14 * scale {
        return Err(VortexError::ZeroTotalCirculation);
    }
    Ok(if s.gamma3 / s.gamma1 > 0.0 {
        SurfaceKind::Spheroid
    } else if theta == 0.0 {
        SurfaceKind::Cone
    } else {
        SurfaceKind::Hyperboloid
    })
}

/// On a spheroid the angular impulse has a fixed sign: that of `γ₁` when all
/// circulations agree in sign, the opposite otherwise.
pub fn admissible_theta_sign(c: &Circulations) -> Option<f64> {
    let s = symmetric_invariants(c);
    if s.gamma3 / s.gamma1 <= 0.0 {
        return None;
    }
    let g = c.as_array();
    let same = g.iter().all(|v| v.signum() == g[0].signum());
    Some(if same { s.gamma1.signum() } else { -s.gamma1.signum() })
}

/// Sign of `Z` on the physical sheet of a hyperboloid or cone: that of `κ₁`.
pub fn physical_z_sign(c: &Circulations) -> Result<f64> {
    Ok(kappas(c)?[0].signum())
}

pub fn classify_surface(c: &Circulations, theta: f64) -> Result<PhaseSurface> {
    let kind = surface_kind(c, theta)?;
    match kind {
        SurfaceKind::Spheroid => {
            let want = admissible_theta_sign(c).unwrap_or(1.0);
            if theta == 0.0 || theta.signum() != want {
                return Err(VortexError::InconsistentInvariant(format!(
                    "a spheroidal surface for circulations {c} needs Θ {} 0, got {theta}",
                    if want > 0.0 { ">" } else { "<" }
                )));
            }
            Ok(PhaseSurface { kind, theta, z_sign: None })
        }
        SurfaceKind::Hyperboloid | SurfaceKind::Cone => {
            Ok(PhaseSurface { kind, theta, z_sign: Some(physical_z_sign(c)?) })
        }
    }
}

/// `Θ² − Z² − (4γ₃/γ₁)(X² + Y²)`
pub fn quadric_residual(s: &ReducedState) -> f64 {
    let g = symmetric_invariants(&s.circulations);
    s.theta * s.theta - s.z * s.z - 4.0 * g.gamma3 / g.gamma1 * (s.x * s.x + s.y * s.y)
}

/// True when `μ₁ = (Θ+Z)/(2κ₁)` and `μ₂ = (Θ−Z)/(2κ₂)` are nonnegative up to `tol`
/// relative to the surface scale.
pub fn is_admissible(s: &ReducedState, tol: f64) -> bool {
    let Ok([k1, k2, _]) = kappas(&s.circulations) else {
        return false;
    };
    let scale = surface_scale(&s.circulations, s.theta).max(s.z.abs());
    let mu1 = (s.theta + s.z) / (2.0 * k1);
    let mu2 = (s.theta - s.z) / (2.0 * k2);
    mu1 * 2.0 * k1.abs() >= -tol * scale && mu2 * 2.0 * k2.abs() >= -tol * scale
}

/// Length scale of the surface: the larger semi-axis (or vertex distance).
pub fn surface_scale(c: &Circulations, theta: f64) -> f64 {
    let g = symmetric_invariants(c);
    let ratio = (g.gamma1 / (4.0 * g.gamma3)).abs().sqrt();
    let s = theta.abs().max(theta.abs() * ratio);
    if s > 0.0 {
        s
    } else {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification_examples() {
        let c = Circulations::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(classify_surface(&c, 1.0).unwrap().kind, SurfaceKind::Spheroid);
        assert!(classify_surface(&c, -1.0).is_err());
        let h = Circulations::new(1.0, 1.0, -1.0).unwrap();
        let s = classify_surface(&h, -1.0).unwrap();
        assert_eq!((s.kind, s.z_sign), (SurfaceKind::Hyperboloid, Some(1.0)));
        let cone = Circulations::parse("2/3,2/3,-1/3").unwrap();
        assert_eq!(classify_surface(&cone, 0.0).unwrap().kind, SurfaceKind::Cone);
    }

    #[test]
    fn one_positive_spheroid_has_negative_theta() {
        let j = Circulations::new(-2.0, -2.0, 5.0).unwrap();
        assert_eq!(admissible_theta_sign(&j), Some(-1.0));
        assert!(classify_surface(&j, -1.0).is_ok());
        assert!(classify_surface(&j, 1.0).is_err());
    }

    #[test]
    fn sheet_follows_kappa_one() {
        let c = Circulations::new(2.0, -1.0, 1.0).unwrap();
        assert_eq!(physical_z_sign(&c).unwrap(), -1.0);
    }
}
