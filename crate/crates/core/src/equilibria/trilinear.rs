use serde::{Deserialize, Serialize};

use super::Stability;
use crate::circulation::{Circulations, Pair};
use crate::error::{Result, VortexError};
use crate::reduction::{admissible_theta_sign, surface_kind, SurfaceKind};
use crate::symmetric_invariants;

const SQRT3_2: f64 = 0.866_025_403_784_438_6;

/// Circulations scaled to unit sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrilinearPoint {
    pub eta1: f64,
    pub eta2: f64,
    pub eta3: f64,
}

impl TrilinearPoint {
    pub fn new(eta1: f64, eta2: f64, eta3: f64) -> Result<Self> {
        let sum = eta1 + eta2 + eta3;
        if !((sum - 1.0).abs() <= 1e-12 * (1.0 + eta1.abs() + eta2.abs() + eta3.abs())) {
            return Err(VortexError::InvalidInput(format!("trilinear coordinates must sum to 1, got {sum}")));
        }
        Ok(TrilinearPoint { eta1, eta2, eta3 })
    }

    /// Scales circulations by their sum.
    pub fn from_circulations(c: &Circulations) -> Result<Self> {
        let g = c.as_array();
        let s = g[0] + g[1] + g[2];
        if s == 0.0 {
            return Err(VortexError::ZeroTotalCirculation);
        }
        Ok(TrilinearPoint { eta1: g[0] / s, eta2: g[1] / s, eta3: g[2] / s })
    }

    pub fn circulations(&self) -> Result<Circulations> {
        Circulations::new(self.eta1, self.eta2, self.eta3)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.eta1, self.eta2, self.eta3]
    }
}

/// `η₃` sits on the top vertex `(0, 1)`, `η₁` at `(−√3/2, −1/2)` and `η₂` at `(√3/2, −1/2)`.
pub fn trilinear_to_cartesian(p: &TrilinearPoint) -> (f64, f64) {
    (SQRT3_2 * (p.eta2 - p.eta1), p.eta3 - 0.5 * (p.eta1 + p.eta2))
}

pub fn cartesian_to_trilinear(x: f64, y: f64) -> TrilinearPoint {
    let eta3 = (2.0 * y + 1.0) / 3.0;
    let rest = 1.0 - eta3;
    let diff = x / SQRT3_2;
    TrilinearPoint { eta1: 0.5 * (rest - diff), eta2: 0.5 * (rest + diff), eta3 }
}

/// `32γ₂γ₁² − 36γ₃γ₁ − 3γ₂²`, positive inside the deltoid.
pub fn deltoid_quartic(c: &Circulations) -> f64 {
    let g = symmetric_invariants(c);
    32.0 * g.gamma2 * g.gamma1 * g.gamma1 - 36.0 * g.gamma3 * g.gamma1 - 3.0 * g.gamma2 * g.gamma2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    Deltoid,
    /// `γ₂ = 0`
    Circle,
    /// `Γ_i + Γ_j = 0`: the singularity `S_ij` moves to infinity.
    PairSum(Pair),
}

/// What the parameter plane predicts at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub eta: TrilinearPoint,
    pub theta: f64,
    pub surface: SurfaceKind,
    /// Required sign of `Θ` on a spheroid.
    pub admissible_theta_sign: Option<f64>,
    pub gamma: [f64; 3],
    pub gamma2_sign: f64,
    pub deltoid_value: f64,
    pub inside_deltoid: bool,
    /// Collinear equilibria summed over both sheets of the surface.
    pub collinear_count: usize,
    pub tri_stability: Stability,
    /// `[Θ⁶, (Γ₁−Γ₂)², (Γ₁+Γ₂)², γ₁², γ₂², γ₃⁶, quartic]`
    pub discriminant_factors: [f64; 7],
    pub boundaries: Vec<Boundary>,
}

pub fn region_classify(p: &TrilinearPoint, theta: f64) -> Result<RegionReport> {
    let eta = p.as_array();
    if eta.iter().any(|v| *v == 0.0) {
        return Err(VortexError::Precondition("all trilinear coordinates must be nonzero".into()));
    }
    let c = p.circulations()?;
    let g = symmetric_invariants(&c);
    let surface = surface_kind(&c, theta)?;
    let quartic = deltoid_quartic(&c);
    let q_scale = 32.0 * g.gamma2.abs() * g.gamma1 * g.gamma1 + 36.0 * (g.gamma3 * g.gamma1).abs() + 3.0 * g.gamma2 * g.gamma2;
    let g2_scale = (eta[0] * eta[1]).abs() + (eta[0] * eta[2]).abs() + (eta[1] * eta[2]).abs();
    let mut boundaries = Vec::new();
    if quartic.abs() < 1e-12 * q_scale {
        boundaries.push(Boundary::Deltoid);
    }
    if g.gamma2.abs() < 1e-12 * g2_scale {
        boundaries.push(Boundary::Circle);
    }
    for pair in Pair::ALL {
        let (i, j) = pair.indices();
        if (eta[i] + eta[j]).abs() < 1e-12 * (eta[i].abs() + eta[j].abs()) {
            boundaries.push(Boundary::PairSum(pair));
        }
    }
    let inside = quartic > 0.0;
    let th3 = theta.powi(3);
    Ok(RegionReport {
        eta: *p,
        theta,
        surface,
        admissible_theta_sign: admissible_theta_sign(&c),
        gamma: [g.gamma1, g.gamma2, g.gamma3],
        gamma2_sign: g.gamma2.signum(),
        deltoid_value: quartic,
        inside_deltoid: inside,
        collinear_count: if inside { 3 } else { 1 },
        tri_stability: if g.gamma2 > 0.0 { Stability::Center } else { Stability::Saddle },
        discriminant_factors: [
            th3 * th3,
            (eta[0] - eta[1]).powi(2),
            (eta[0] + eta[1]).powi(2),
            g.gamma1 * g.gamma1,
            g.gamma2 * g.gamma2,
            g.gamma3.powi(6),
            quartic,
        ],
        boundaries,
    })
}
