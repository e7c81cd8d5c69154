use serde::{Deserialize, Serialize};

use crate::circulation::Circulations;
use crate::error::{Result, VortexError};
use crate::integrate::Termination;
use crate::reduction::{
    integrate_reduced_with, pair_distances_sq, physical_z_sign, reduced_hamiltonian, reduced_vector_field,
    ReducedOptions, ReducedState,
};
use crate::symmetric_invariants;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseReport {
    pub r0: f64,
    /// Polar angle of `(X, Y)`.
    pub angle: f64,
    /// `d√(X²+Y²)/dt` from the reduced field.
    pub radial_rate: f64,
    /// `2√3 sin 2θ/(3 cos 2θ − 5)`, for circulations proportional to `(2, 2, −1)`.
    pub formula_rate: Option<f64>,
    /// `h − (1/9) log((X² + 4Y²)/(X² + Y²))` for the same family.
    pub h_offset: Option<f64>,
    /// `r₀/|dr/dt|` when the triangle shrinks.
    pub predicted_time: Option<f64>,
    /// Time at which the integration reached the collision floor.
    pub integrated_time: Option<f64>,
    /// `√(X²+Y²)` at that time.
    pub final_radius: Option<f64>,
}

/// `(1/9) log((X² + 4Y²)/(X² + Y²))`
pub fn collapse_h(x: f64, y: f64) -> f64 {
    ((x * x + 4.0 * y * y) / (x * x + y * y)).ln() / 9.0
}

/// `2√3 sin 2θ/(3 cos 2θ − 5)`
pub fn collapse_radial_rate(angle: f64) -> f64 {
    2.0 * 3f64.sqrt() * (2.0 * angle).sin() / (3.0 * (2.0 * angle).cos() - 5.0)
}

fn is_collapse_family(c: &Circulations) -> bool {
    let [g1, g2, g3] = c.as_array();
    let tol = 1e-12 * (g1.abs() + g2.abs() + g3.abs());
    (g1 - g2).abs() <= tol && (g1 + 2.0 * g3).abs() <= tol && (g1 + g2 + g3 - 1.0).abs() <= tol
}

/// The point of the physical nappe of the cone `Θ = 0` above `r·(cos θ, sin θ)`.
pub fn cone_state(c: &Circulations, r: f64, angle: f64) -> Result<ReducedState> {
    let g = symmetric_invariants(c);
    let k = -4.0 * g.gamma3 / g.gamma1;
    if !(k > 0.0) {
        return Err(VortexError::Precondition(format!("circulations {c} do not give a cone at Θ = 0")));
    }
    let z = physical_z_sign(c)? * k.sqrt() * r;
    Ok(ReducedState::new(r * angle.cos(), r * angle.sin(), z, 0.0, c.clone()))
}

/// Self-similar motion on the cone `Θ = 0` when `γ₂ = 0`.
pub fn collapse_analysis(state: &ReducedState, tol: f64) -> Result<CollapseReport> {
    let c = &state.circulations;
    let [g1, g2, g3] = c.as_array();
    let g = symmetric_invariants(c);
    if g.gamma2.abs() > 1e-12 * ((g1 * g2).abs() + (g1 * g3).abs() + (g2 * g3).abs()) {
        return Err(VortexError::Precondition(format!("collapse needs γ₂ = 0, got {}", g.gamma2)));
    }
    if state.theta != 0.0 {
        return Err(VortexError::Precondition(format!("collapse needs Θ = 0, got {}", state.theta)));
    }
    let r0 = state.x.hypot(state.y);
    let angle = state.y.atan2(state.x);
    let f = reduced_vector_field(state)?;
    let radial_rate = (state.x * f[0] + state.y * f[1]) / r0;
    let family = is_collapse_family(c);
    let formula_rate = family.then(|| collapse_radial_rate(angle));
    let h_offset = if family { Some(reduced_hamiltonian(state)? - collapse_h(state.x, state.y)) } else { None };
    let shrinking = radial_rate < 0.0;
    let predicted_time = shrinking.then(|| -r0 / radial_rate);

    let (mut integrated_time, mut final_radius) = (None, None);
    if let Some(t_star) = predicted_time {
        let d0 = pair_distances_sq(state).iter().map(|d| d.abs().sqrt()).fold(f64::INFINITY, f64::min);
        let mut opts = ReducedOptions::new(tol);
        opts.singular_floor = Some(1e-2 * d0);
        // The motion is a straight line through the origin; a dense output grid
        // keeps the solver from stepping across it.
        opts.output_times = Some((1..=4000).map(|k| 2.0 * t_star * k as f64 / 4000.0).collect());
        let traj = integrate_reduced_with(state, (0.0, 2.0 * t_star), &opts)?;
        if let Termination::NearSingularity { t, .. } = traj.termination {
            integrated_time = Some(t);
            final_radius = traj.states.last().map(|s| s.x.hypot(s.y));
        }
    }
    Ok(CollapseReport { r0, angle, radial_rate, formula_rate, h_offset, predicted_time, integrated_time, final_radius })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn family() -> Circulations {
        Circulations::parse("2/3,2/3,-1/3").unwrap()
    }

    #[test]
    fn quarter_turn_collapses() {
        let s = cone_state(&family(), 1.0, PI / 4.0).unwrap();
        let r = collapse_analysis(&s, 1e-11).unwrap();
        let want = -2.0 * 3f64.sqrt() / 5.0;
        assert!((r.radial_rate - want).abs() < 1e-10);
        assert!((r.formula_rate.unwrap() - want).abs() < 1e-15);
        let t = r.integrated_time.unwrap();
        let t_star = 5.0 / (2.0 * 3f64.sqrt());
        assert!((t - t_star).abs() < 0.01 * t_star, "{t} vs {t_star}");
    }

    #[test]
    fn axes_keep_their_size() {
        for angle in [0.0, PI / 2.0] {
            let r = collapse_analysis(&cone_state(&family(), 1.0, angle).unwrap(), 1e-10).unwrap();
            assert!(r.radial_rate.abs() < 1e-12);
            assert!(r.predicted_time.is_none());
        }
    }

    #[test]
    fn hamiltonian_matches_closed_form() {
        let offsets: Vec<f64> = (0..20)
            .map(|k| {
                let s = cone_state(&family(), 0.3 + 0.1 * k as f64, 0.1 + 0.29 * k as f64).unwrap();
                collapse_analysis(&s, 1e-9).unwrap().h_offset.unwrap()
            })
            .collect();
        assert!(offsets.iter().all(|o| (o - offsets[0]).abs() < 1e-12), "{offsets:?}");
    }

    #[test]
    fn needs_vanishing_gamma2() {
        let c = Circulations::parse("1/3,1/3,1/3").unwrap();
        let s = ReducedState::new(0.0, 0.0, 1.0, 1.0, c);
        assert!(matches!(collapse_analysis(&s, 1e-9), Err(VortexError::Precondition(_))));
    }
}
