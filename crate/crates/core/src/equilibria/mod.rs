//! Relative equilibria of the reduced flow, their stability, the trilinear
//! parameter plane and bifurcation scans along the symmetric family.

mod collinear;
mod equilateral;
mod symmetric;
mod trilinear;

pub use collinear::{
    collinear_equilibria, collinear_equilibria_all, collinear_polynomials, collinear_stability, discriminant_p3,
    p3_polynomial, stability_boundary_value, CollinearSystem, DiscriminantReport, StabilityBoundary,
};
pub use equilateral::{equilateral_equilibria, equilateral_eigenvalue_sq, tri_stability};
pub use symmetric::{
    bifurcation_scan, symmetric_case_equilibria, write_scan_csv, ScanBranch, ScanRow, SymmetricBranch,
};
pub use trilinear::{
    cartesian_to_trilinear, deltoid_quartic, region_classify, trilinear_to_cartesian, Boundary, RegionReport,
    TrilinearPoint,
};

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::reduction::{
    is_admissible, quadric_residual, reduced_gradient, reduced_hessian, reduced_vector_field, surface_scale,
    LogForms, ReducedState,
};
use crate::symmetric_invariants;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EquilibriumKind {
    Equilateral,
    Collinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stability {
    Center,
    Saddle,
    Degenerate,
}

impl std::fmt::Display for Stability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Stability::Center => "Center",
            Stability::Saddle => "Saddle",
            Stability::Degenerate => "Degenerate",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub state: ReducedState,
    pub kind: EquilibriumKind,
    pub eigenvalues: [Complex64; 3],
    pub classification: Stability,
    /// `r` in `χ(λ) = −λ³ − rλ`, so that `λ² = −r`.
    pub r: f64,
    /// Whether the point lies on the physical part of the surface
    /// (nonnegative squared Jacobi lengths).
    pub admissible: bool,
}

impl Equilibrium {
    /// Linearizes at `state` and classifies.
    pub fn at(state: ReducedState, kind: EquilibriumKind) -> Result<Self> {
        let j = reduced_jacobian(&state)?;
        let r = j[(0, 0)] * j[(1, 1)] - j[(0, 1)] * j[(1, 0)] + j[(0, 0)] * j[(2, 2)] - j[(0, 2)] * j[(2, 0)]
            + j[(1, 1)] * j[(2, 2)]
            - j[(1, 2)] * j[(2, 1)];
        let eig = j.complex_eigenvalues();
        let mut eigenvalues = [eig[0], eig[1], eig[2]];
        eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let scale = j.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let classification = if r.abs() <= 1e-10 * scale * scale.max(1.0) || r.abs() < 1e-300 {
            Stability::Degenerate
        } else if r > 0.0 {
            Stability::Center
        } else {
            Stability::Saddle
        };
        let admissible = is_admissible(&state, 1e-10);
        Ok(Equilibrium { state, kind, eigenvalues, classification, r, admissible })
    }

    /// `‖F‖∞` relative to the size of the individual terms of the field.
    pub fn relative_residual(&self) -> Result<f64> {
        field_residual(&self.state)
    }
}

/// Analytic Jacobian of the reduced vector field in `(X, Y, Z)`.
pub fn reduced_jacobian(s: &ReducedState) -> Result<Matrix3<f64>> {
    let (hx, hz) = reduced_gradient(s)?;
    let (hxx, hxz, hzz) = reduced_hessian(s)?;
    let g = symmetric_invariants(&s.circulations);
    let k = g.gamma1 / g.gamma3;
    let (x, y, z) = (s.x, s.y, s.z);
    Ok(Matrix3::new(
        -4.0 * hxz * y,
        -4.0 * hz,
        -4.0 * hzz * y,
        4.0 * hxz * x + 4.0 * hz - k * hxx * z,
        0.0,
        4.0 * hzz * x - k * hx - k * hxz * z,
        4.0 * hxx * y,
        4.0 * hx,
        4.0 * hxz * y,
    ))
}

/// Field residual normalized by `(4 + |γ₁/γ₃|)·G·L`, where `G` bounds the
/// gradient terms and `L` is the coordinate scale.
pub(crate) fn field_residual(s: &ReducedState) -> Result<f64> {
    let f = reduced_vector_field(s)?;
    let forms = LogForms::new(&s.circulations);
    let v = forms.values(s.x, s.z, s.theta);
    let g: f64 =
        (0..3).map(|k| 0.5 * forms.weight[k].abs() * (forms.a[k].abs() + forms.b[k].abs()) / v[k].abs()).sum();
    let inv = symmetric_invariants(&s.circulations);
    let l = s.x.abs().max(s.y.abs()).max(s.z.abs()).max(surface_scale(&s.circulations, s.theta));
    let norm = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(norm / ((4.0 + (inv.gamma1 / inv.gamma3).abs()) * g * l))
}

/// Quadric residual relative to the squared coordinate scale.
pub(crate) fn relative_quadric_residual(s: &ReducedState) -> f64 {
    let l = s.x.abs().max(s.y.abs()).max(s.z.abs()).max(surface_scale(&s.circulations, s.theta));
    quadric_residual(s).abs() / (l * l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Circulations;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn jacobian_is_traceless_and_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..300 {
            let c = Circulations::new(rng.random_range(0.1..2.0), rng.random_range(0.1..2.0), rng.random_range(-2.0..2.0))
                .unwrap();
            let s = ReducedState::new(
                rng.random_range(-0.5..0.5),
                rng.random_range(-0.5..0.5),
                rng.random_range(0.2..0.8),
                1.0,
                c,
            );
            let Ok(j) = reduced_jacobian(&s) else { continue };
            assert!(j.trace().abs() < 1e-12 * j.norm().max(1.0));
            let step = 1e-6;
            for col in 0..3 {
                let mut p = s.xyz();
                p[col] += step;
                let fp = reduced_vector_field(&s.with_xyz(p)).unwrap();
                p[col] -= 2.0 * step;
                let fm = reduced_vector_field(&s.with_xyz(p)).unwrap();
                for row in 0..3 {
                    let fd = (fp[row] - fm[row]) / (2.0 * step);
                    assert!((fd - j[(row, col)]).abs() <= 1e-6 * j.norm().max(1.0));
                }
            }
        }
    }
}
