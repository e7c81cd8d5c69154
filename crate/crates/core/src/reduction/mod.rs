//! Reduction of the three-vortex problem to a flow on a quadric surface in
//! `(X, Y, Z)` space with the angular impulse `Θ` as parameter.
//!
//! Conventions: `μ₃ + iμ₄ = conj(Z₁)·Z₂`, so that `μ₄ = R₁R₂ sin(φ₂ − φ₁)`.
//! With this orientation the reduced vector field
//! `(−4h_Z Y, 4h_Z X − (γ₁/γ₃) h_X Z, 4h_X Y)` is the pushforward of the
//! full dynamics.

mod flow;
mod hamiltonian;
mod jacobi;
mod surface;

pub use flow::{
    integrate_reduced, integrate_reduced_with, mu_vector_field, project_to_quadric, reconstruct,
    reduced_vector_field, write_reduced_csv, ReducedDiagnostics, ReducedOptions, ReducedTrajectory,
};
pub use hamiltonian::{
    hamiltonian_offset, pair_distances_sq, reduced_gradient, reduced_hamiltonian, reduced_hessian,
    singularities, LogForms, SingularPoint,
};
pub use jacobi::{
    kappas, momentum_map, reduce, suggest_labeling, to_jacobi, to_jacobi_labeled, to_reduced,
    JacobiState, MomentumCoordinates, Reduction, IDENTITY_LABELING,
};
pub use surface::{
    admissible_theta_sign, classify_surface, is_admissible, physical_z_sign, quadric_residual,
    surface_kind, surface_scale, PhaseSurface, SurfaceKind,
};

use serde::{Deserialize, Serialize};

use crate::circulation::Circulations;

/// A point of the reduced phase space together with its surface parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedState {
    #[serde(rename = "X")]
    pub x: f64,
    #[serde(rename = "Y")]
    pub y: f64,
    #[serde(rename = "Z")]
    pub z: f64,
    #[serde(rename = "Theta")]
    pub theta: f64,
    pub circulations: Circulations,
}

impl ReducedState {
    pub fn new(x: f64, y: f64, z: f64, theta: f64, circulations: Circulations) -> Self {
        ReducedState { x, y, z, theta, circulations }
    }

    pub fn xyz(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn with_xyz(&self, p: [f64; 3]) -> Self {
        ReducedState { x: p[0], y: p[1], z: p[2], theta: self.theta, circulations: self.circulations.clone() }
    }

    pub fn distance_to(&self, p: [f64; 3]) -> f64 {
        ((self.x - p[0]).powi(2) + (self.y - p[1]).powi(2) + (self.z - p[2]).powi(2)).sqrt()
    }
}
