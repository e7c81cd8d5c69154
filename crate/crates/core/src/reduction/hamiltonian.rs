use serde::{Deserialize, Serialize};

use super::ReducedState;
use crate::circulation::{symmetric_invariants, Circulations, Pair};
use crate::error::{Result, VortexError};

/// The three affine forms `A_ij = a X + b Z + c Θ` whose logarithms make up the
/// reduced Hamiltonian `h = −½ Σ w_ij log|A_ij|`. Each form equals the squared
/// distance `|z_i − z_j|²` times `multiplier`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogForms {
    pub weight: [f64; 3],
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub c: [f64; 3],
    pub multiplier: [f64; 3],
}

impl LogForms {
    pub fn new(circ: &Circulations) -> Self {
        let [g1, g2, g3] = circ.as_array();
        let inv = symmetric_invariants(circ);
        let (gam1, gam3) = (inv.gamma1, inv.gamma3);
        let s = g1 + g2;
        LogForms {
            weight: [g1 * g2, g1 * g3, g2 * g3],
            a: [0.0, 4.0 * gam3, -4.0 * gam3],
            b: [1.0, g2 * g3 - gam1 * g1, g1 * g3 - gam1 * g2],
            c: [1.0, s * (g1 + g3), s * (g2 + g3)],
            multiplier: [2.0 * g1 * g2 / s, 2.0 * s * g1 * g3, 2.0 * s * g2 * g3],
        }
    }

    pub fn values(&self, x: f64, z: f64, theta: f64) -> [f64; 3] {
        [0, 1, 2].map(|k| self.a[k] * x + self.b[k] * z + self.c[k] * theta)
    }

    fn scales(&self, x: f64, z: f64, theta: f64) -> [f64; 3] {
        [0, 1, 2].map(|k| self.a[k].abs() * x.abs() + self.b[k].abs() * z.abs() + self.c[k].abs() * theta.abs())
    }

    /// Values of the forms, or the pair whose form vanishes.
    pub fn checked_values(&self, x: f64, z: f64, theta: f64) -> Result<[f64; 3]> {
        let v = self.values(x, z, theta);
        let sc = self.scales(x, z, theta);
        for k in 0..3 {
            if !(v[k].abs() > 1e-14 * sc[k]) {
                return Err(VortexError::Singularity(Pair::ALL[k]));
            }
        }
        Ok(v)
    }
}

fn forms_at(s: &ReducedState) -> Result<(LogForms, [f64; 3])> {
    let f = LogForms::new(&s.circulations);
    let v = f.checked_values(s.x, s.z, s.theta)?;
    Ok((f, v))
}

pub fn reduced_hamiltonian(s: &ReducedState) -> Result<f64> {
    let (f, v) = forms_at(s)?;
    Ok(-0.5 * (0..3).map(|k| f.weight[k] * v[k].abs().ln()).sum::<f64>())
}

/// `(∂h/∂X, ∂h/∂Z)`; the Hamiltonian does not depend on `Y`.
pub fn reduced_gradient(s: &ReducedState) -> Result<(f64, f64)> {
    let (f, v) = forms_at(s)?;
    let mut hx = 0.0;
    let mut hz = 0.0;
    for k in 0..3 {
        hx -= 0.5 * f.weight[k] * f.a[k] / v[k];
        hz -= 0.5 * f.weight[k] * f.b[k] / v[k];
    }
    Ok((hx, hz))
}

/// `(h_XX, h_XZ, h_ZZ)`
pub fn reduced_hessian(s: &ReducedState) -> Result<(f64, f64, f64)> {
    let (f, v) = forms_at(s)?;
    let mut out = (0.0, 0.0, 0.0);
    for k in 0..3 {
        let w = 0.5 * f.weight[k] / (v[k] * v[k]);
        out.0 += w * f.a[k] * f.a[k];
        out.1 += w * f.a[k] * f.b[k];
        out.2 += w * f.b[k] * f.b[k];
    }
    Ok(out)
}

/// The constant `h(reduce(cfg)) − H(cfg)` for these circulations.
pub fn hamiltonian_offset(c: &Circulations) -> f64 {
    let f = LogForms::new(c);
    -0.5 * (0..3).map(|k| f.weight[k] * f.multiplier[k].abs().ln()).sum::<f64>()
}

/// Squared pair distances `[|z₁₂|², |z₁₃|², |z₂₃|²]` encoded by a reduced state.
pub fn pair_distances_sq(s: &ReducedState) -> [f64; 3] {
    let f = LogForms::new(&s.circulations);
    let v = f.values(s.x, s.z, s.theta);
    [0, 1, 2].map(|k| v[k] / f.multiplier[k])
}

/// A collision point of the reduced phase space; `location` is `None` when the
/// pair sum vanishes and the point lies at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularPoint {
    pub pair: Pair,
    pub location: Option<[f64; 3]>,
}

pub fn singularities(c: &Circulations, theta: f64) -> [SingularPoint; 3] {
    let [g1, g2, g3] = c.as_array();
    let gam1 = g1 + g2 + g3;
    let s = g1 + g2;
    let s13 = (g1 + g3 != 0.0).then(|| {
        let d = s * (g1 + g3);
        [-gam1 * theta / d, 0.0, (gam1 * g1 - g2 * g3) * theta / d]
    });
    let s23 = (g2 + g3 != 0.0).then(|| {
        let d = s * (g2 + g3);
        [gam1 * theta / d, 0.0, (gam1 * g2 - g1 * g3) * theta / d]
    });
    [
        SingularPoint { pair: Pair::P12, location: Some([0.0, 0.0, -theta]) },
        SingularPoint { pair: Pair::P13, location: s13 },
        SingularPoint { pair: Pair::P23, location: s23 },
    ]
}
