use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VortexError};

/// Canonical coordinates of a `±Γ` pair: the midpoint and the rotated separation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipoleCanonicalState {
    pub q1: f64,
    pub q2: f64,
    pub p1: f64,
    pub p2: f64,
}

impl DipoleCanonicalState {
    /// `z1` carries `+Γ`, `z2` carries `−Γ`.
    pub fn from_pair(z1: Complex64, z2: Complex64) -> Self {
        DipoleCanonicalState {
            q1: 0.5 * (z1.re + z2.re),
            q2: 0.5 * (z1.im + z2.im),
            p1: z1.im - z2.im,
            p2: -z1.re + z2.re,
        }
    }

    pub fn positions(&self) -> (Complex64, Complex64) {
        let q = Complex64::new(self.q1, self.q2);
        let half = 0.5 * Complex64::new(-self.p2, self.p1);
        (q + half, q - half)
    }

    /// `(Γ²/2) log(P₁² + P₂²)`
    pub fn hamiltonian(&self, gamma: f64) -> Result<f64> {
        let p2 = self.momentum_sq()?;
        Ok(0.5 * gamma * gamma * p2.ln())
    }

    /// `dQ/dt = Γ (P₁, P₂)/(P₁² + P₂²)`; the momenta are constant.
    pub fn velocity(&self, gamma: f64) -> Result<(f64, f64)> {
        let p2 = self.momentum_sq()?;
        Ok((gamma * self.p1 / p2, gamma * self.p2 / p2))
    }

    fn momentum_sq(&self) -> Result<f64> {
        let p2 = self.p1 * self.p1 + self.p2 * self.p2;
        if p2 == 0.0 {
            return Err(VortexError::SingularConfiguration(1, 2));
        }
        Ok(p2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::VortexConfiguration;
    use crate::integrate_full;

    #[test]
    fn positions_round_trip() {
        let d = DipoleCanonicalState::from_pair(Complex64::new(0.3, -1.2), Complex64::new(2.0, 0.5));
        let (a, b) = d.positions();
        assert!((a - Complex64::new(0.3, -1.2)).norm() < 1e-15);
        assert!((b - Complex64::new(2.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn pair_translates_uniformly() {
        let gamma = 1.7;
        let (z1, z2) = (Complex64::new(0.4, 0.9), Complex64::new(-0.6, 0.2));
        let cfg = VortexConfiguration::new(vec![z1, z2], vec![gamma, -gamma]).unwrap();
        let d0 = DipoleCanonicalState::from_pair(z1, z2);
        let (vx, vy) = d0.velocity(gamma).unwrap();
        let traj = integrate_full(&cfg, (0.0, 10.0), 1e-12).unwrap();
        for (t, s) in traj.times.iter().zip(&traj.states) {
            let d = DipoleCanonicalState::from_pair(s.positions[0], s.positions[1]);
            assert!((d.q1 - d0.q1 - vx * t).abs() < 1e-10);
            assert!((d.q2 - d0.q2 - vy * t).abs() < 1e-10);
            assert!((d.p1 - d0.p1).abs() < 1e-10 && (d.p2 - d0.p2).abs() < 1e-10);
        }
    }
}
