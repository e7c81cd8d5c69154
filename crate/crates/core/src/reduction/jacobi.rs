use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ReducedState;
use crate::circulation::Circulations;
use crate::error::{Result, VortexError};
use crate::model::VortexConfiguration;

pub const IDENTITY_LABELING: [usize; 3] = [0, 1, 2];

/// Jacobi coordinates with their masses. `labeling[k]` is the zero-based
/// original index of the vortex playing the role of vortex `k + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobiState {
    pub z1: Complex64,
    pub z2: Complex64,
    pub z3: Complex64,
    pub kappa: [f64; 3],
    pub labeling: [usize; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumCoordinates {
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
    pub mu4: f64,
}

impl MomentumCoordinates {
    /// `μ₁μ₂ − μ₃² − μ₄²`, zero on the image of the momentum map.
    pub fn rank_defect(&self) -> f64 {
        self.mu1 * self.mu2 - self.mu3 * self.mu3 - self.mu4 * self.mu4
    }
}

fn total_is_zero(c: &Circulations) -> bool {
    let g = c.as_array();
    let scale: f64 = g.iter().map(|v| v.abs()).sum();
    (g[0] + g[1] + g[2]).abs() <= 1e-14 * scale
}

/// `(κ₁, κ₂, κ₃) = (Γ₁Γ₂/(Γ₁+Γ₂), (Γ₁+Γ₂)Γ₃/γ₁, γ₁)`
pub fn kappas(c: &Circulations) -> Result<[f64; 3]> {
    let [g1, g2, g3] = c.as_array();
    if total_is_zero(c) {
        return Err(VortexError::ZeroTotalCirculation);
    }
    let s = g1 + g2;
    if s == 0.0 {
        return Err(VortexError::RelabelRequired(IDENTITY_LABELING));
    }
    let gamma1 = g1 + g2 + g3;
    Ok([g1 * g2 / s, s * g3 / gamma1, gamma1])
}

/// First labeling, in a fixed preference order, whose leading pair sum is nonzero.
pub fn suggest_labeling(c: &Circulations) -> [usize; 3] {
    let g = c.as_array();
    [[0, 1, 2], [0, 2, 1], [1, 2, 0]]
        .into_iter()
        .find(|p| g[p[0]] + g[p[1]] != 0.0)
        .unwrap_or(IDENTITY_LABELING)
}

/// Jacobi coordinates in the given labeling; fails with a suggested labeling
/// when `Γ₁ + Γ₂ = 0`.
pub fn to_jacobi(cfg: &VortexConfiguration) -> Result<JacobiState> {
    to_jacobi_labeled(cfg, IDENTITY_LABELING)
}

pub fn to_jacobi_labeled(cfg: &VortexConfiguration, labeling: [usize; 3]) -> Result<JacobiState> {
    let c = cfg.circulations3()?.permuted(labeling);
    let kappa = match kappas(&c) {
        Err(VortexError::RelabelRequired(_)) => {
            let orig = cfg.circulations3()?;
            return Err(VortexError::RelabelRequired(suggest_labeling(&orig)));
        }
        other => other?,
    };
    let [g1, g2, g3] = c.as_array();
    let z = [cfg.positions[labeling[0]], cfg.positions[labeling[1]], cfg.positions[labeling[2]]];
    let s = g1 + g2;
    let inner = (z[0] * g1 + z[1] * g2) / s;
    Ok(JacobiState {
        z1: z[0] - z[1],
        z2: inner - z[2],
        z3: (z[0] * g1 + z[1] * g2 + z[2] * g3) / (s + g3),
        kappa,
        labeling,
    })
}

pub fn momentum_map(j: &JacobiState) -> MomentumCoordinates {
    let w = j.z1.conj() * j.z2;
    MomentumCoordinates { mu1: j.z1.norm_sqr(), mu2: j.z2.norm_sqr(), mu3: w.re, mu4: w.im }
}

/// `Z = κ₁μ₁ − κ₂μ₂`, `X + iY = μ₃ + iμ₄`, `Θ = κ₁μ₁ + κ₂μ₂`. The
/// circulations attached are those of the labeling used by `j`.
pub fn to_reduced(m: &MomentumCoordinates, j: &JacobiState, c: &Circulations) -> ReducedState {
    let [k1, k2, _] = j.kappa;
    ReducedState::new(m.mu3, m.mu4, k1 * m.mu1 - k2 * m.mu2, k1 * m.mu1 + k2 * m.mu2, c.permuted(j.labeling))
}

/// All stages of reducing one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reduction {
    pub jacobi: JacobiState,
    pub momentum: MomentumCoordinates,
    pub state: ReducedState,
}

/// Reduces a three-vortex configuration, relabeling automatically if the
/// leading pair sum vanishes.
pub fn reduce(cfg: &VortexConfiguration) -> Result<Reduction> {
    let c = cfg.circulations3()?;
    let jacobi = match to_jacobi(cfg) {
        Err(VortexError::RelabelRequired(p)) => to_jacobi_labeled(cfg, p)?,
        other => other?,
    };
    let momentum = momentum_map(&jacobi);
    let state = to_reduced(&momentum, &jacobi, &c);
    Ok(Reduction { jacobi, momentum, state })
}
