//! Reduction for three vortices whose circulations sum to zero.
//!
//! The pair (1,2) is replaced by its relative vector `Z = z₁ − z₂` and its
//! centre of vorticity `w`, which forms a dipole with vortex 3. The dipole
//! vector `D = w − z₃` is the conserved linear impulse divided by `Γ₁+Γ₂`;
//! rotating and scaling the plane so that `D = −1` leaves `X + iY = Z` as
//! the only dynamical variable. When `D = 0` the plane has no preferred
//! scale and the degenerate Hamiltonian applies.

mod dipole;
mod flow;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use dipole::DipoleCanonicalState;
pub use flow::{
    gauged_pair_distances, integrate_zero, integrate_zero_with, write_zero_csv, ZeroDiagnostics, ZeroOptions,
    ZeroTrajectory,
};

use crate::circulation::Pair;
use crate::equilibria::Stability;
use crate::error::{Result, VortexError};
use crate::model::{vortex_velocities, VortexConfiguration};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZeroCircKind {
    /// Nonzero linear impulse, gauged to `P₂ = 0`, `P₃ = 1`.
    Generic,
    /// Vanishing linear impulse.
    Degenerate,
}

/// `Γ₃ = −Γ₁ − Γ₂` is implied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroCircReducedState {
    pub x: f64,
    pub y: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub kind: ZeroCircKind,
}

impl ZeroCircReducedState {
    pub fn new(x: f64, y: f64, gamma1: f64, gamma2: f64) -> Self {
        ZeroCircReducedState { x, y, gamma1, gamma2, kind: ZeroCircKind::Generic }
    }

    pub fn degenerate(x: f64, y: f64, gamma1: f64, gamma2: f64) -> Self {
        ZeroCircReducedState { x, y, gamma1, gamma2, kind: ZeroCircKind::Degenerate }
    }

    pub fn with_xy(&self, x: f64, y: f64) -> Self {
        ZeroCircReducedState { x, y, ..*self }
    }

    pub fn gamma3(&self) -> f64 {
        -self.gamma1 - self.gamma2
    }

    pub fn circulations(&self) -> [f64; 3] {
        [self.gamma1, self.gamma2, self.gamma3()]
    }

    fn terms(&self) -> LogTerms {
        match self.kind {
            ZeroCircKind::Generic => LogTerms::generic(self.gamma1, self.gamma2),
            ZeroCircKind::Degenerate => LogTerms::degenerate(self.gamma1, self.gamma2),
        }
    }

    pub fn hamiltonian(&self) -> Result<f64> {
        self.terms().value(self.x, self.y)
    }

    pub fn gradient(&self) -> Result<(f64, f64)> {
        self.terms().gradient(self.x, self.y)
    }

    /// `[[h_XX, h_XY], [h_XY, h_YY]]`
    pub fn hessian(&self) -> Result<[[f64; 2]; 2]> {
        self.terms().hessian(self.x, self.y)
    }
}

/// Similarity taking gauged positions to physical ones: `z = scale·e^{i·rotation}·z' + translation`.
/// Reduced time `τ` corresponds to physical time `scale²·τ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroCircGauge {
    pub scale: f64,
    pub rotation: f64,
    pub translation: Complex64,
}

impl ZeroCircGauge {
    pub fn identity() -> Self {
        ZeroCircGauge { scale: 1.0, rotation: 0.0, translation: Complex64::new(0.0, 0.0) }
    }

    pub fn to_physical(&self, z: Complex64) -> Complex64 {
        Complex64::from_polar(self.scale, self.rotation) * z + self.translation
    }

    pub fn to_gauged(&self, z: Complex64) -> Complex64 {
        (z - self.translation) / Complex64::from_polar(self.scale, self.rotation)
    }

    pub fn time_scale(&self) -> f64 {
        self.scale * self.scale
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroCircReduction {
    pub state: ZeroCircReducedState,
    pub gauge: ZeroCircGauge,
}

/// Relative tolerance for the vanishing total circulation.
pub const ZERO_SUM_TOL: f64 = 1e-14;

fn check_zero_sum(g: &[f64]) -> Result<()> {
    let sum: f64 = g.iter().sum();
    let scale: f64 = g.iter().map(|v| v.abs()).sum();
    if g.iter().any(|v| *v == 0.0 || !v.is_finite()) {
        return Err(VortexError::InvalidInput("circulations must be finite and nonzero".into()));
    }
    if sum.abs() > ZERO_SUM_TOL * scale {
        return Err(VortexError::Precondition(format!("total circulation is {sum}, not zero")));
    }
    Ok(())
}

pub fn to_zero_reduced(cfg: &VortexConfiguration) -> Result<ZeroCircReduction> {
    if cfg.len() != 3 {
        return Err(VortexError::Precondition(format!("expected 3 vortices, got {}", cfg.len())));
    }
    check_zero_sum(&cfg.circulations)?;
    cfg.check_distinct()?;
    let (g1, g2) = (cfg.circulations[0], cfg.circulations[1]);
    let s = g1 + g2;
    let z = &cfg.positions;
    let rel = z[0] - z[1];
    let w = (z[0] * g1 + z[1] * g2) / s;
    let dip = w - z[2];
    let size = rel.norm().max(z[0].norm()).max(z[1].norm()).max(z[2].norm());
    if dip.norm() <= 1e-12 * size {
        let gauge = ZeroCircGauge { translation: w, ..ZeroCircGauge::identity() };
        return Ok(ZeroCircReduction { state: ZeroCircReducedState::degenerate(rel.re, rel.im, g1, g2), gauge });
    }
    let scale = dip.norm();
    let rotation = (-dip).arg();
    let gauge = ZeroCircGauge { scale, rotation, translation: 0.5 * (w + z[2]) };
    let zr = rel / Complex64::from_polar(scale, rotation);
    Ok(ZeroCircReduction { state: ZeroCircReducedState::new(zr.re, zr.im, g1, g2), gauge })
}

/// Physical positions of a gauged state.
pub fn from_zero_reduced(s: &ZeroCircReducedState, gauge: &ZeroCircGauge) -> Result<VortexConfiguration> {
    let (g1, g2) = (s.gamma1, s.gamma2);
    let sum = g1 + g2;
    if sum == 0.0 {
        return Err(VortexError::InvalidInput("Γ₁ + Γ₂ must be nonzero".into()));
    }
    let rel = Complex64::new(s.x, s.y);
    let (w, z3) = match s.kind {
        ZeroCircKind::Generic => (Complex64::new(-0.5, 0.0), Complex64::new(0.5, 0.0)),
        ZeroCircKind::Degenerate => (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
    };
    let gauged = [w + rel * (g2 / sum), w - rel * (g1 / sum), z3];
    VortexConfiguration::new(gauged.iter().map(|z| gauge.to_physical(*z)).collect(), s.circulations().to_vec())
}

/// `h = Σ (ω/2) log((αX − β)² + α²Y²)`, one term per pair.
struct LogTerms {
    terms: Vec<(Pair, f64, f64, f64)>,
}

impl LogTerms {
    fn generic(g1: f64, g2: f64) -> Self {
        let s = g1 + g2;
        LogTerms {
            terms: vec![(Pair::P12, -g1 * g2, 1.0, 0.0), (Pair::P13, s * g1, g2, s), (Pair::P23, s * g2, g1, -s)],
        }
    }

    fn degenerate(g1: f64, g2: f64) -> Self {
        LogTerms { terms: vec![(Pair::P12, g1 * g1 + g1 * g2 + g2 * g2, 1.0, 0.0)] }
    }

    /// `(ω, α, u, ρ)` with `u = (αX − β, αY)`, `ρ = |u|²`.
    fn parts(&self, x: f64, y: f64) -> Result<Vec<(f64, f64, [f64; 2], f64)>> {
        let single = self.terms.len() == 1;
        self.terms
            .iter()
            .map(|&(pair, omega, alpha, beta)| {
                let u = [alpha * x - beta, alpha * y];
                let rho = u[0] * u[0] + u[1] * u[1];
                let scale = (alpha * x).abs() + beta.abs() + (alpha * y).abs();
                if rho <= (1e-14 * scale).powi(2) || rho == 0.0 {
                    return Err(if single { VortexError::TripleCollision } else { VortexError::Singularity(pair) });
                }
                Ok((omega, alpha, u, rho))
            })
            .collect()
    }

    fn value(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.parts(x, y)?.iter().map(|(omega, _, _, rho)| 0.5 * omega * rho.ln()).sum())
    }

    fn gradient(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        let mut g = (0.0, 0.0);
        for (omega, alpha, u, rho) in self.parts(x, y)? {
            g.0 += omega * alpha * u[0] / rho;
            g.1 += omega * alpha * u[1] / rho;
        }
        Ok(g)
    }

    fn hessian(&self, x: f64, y: f64) -> Result<[[f64; 2]; 2]> {
        let mut h = [[0.0; 2]; 2];
        for (omega, alpha, u, rho) in self.parts(x, y)? {
            let f = omega * alpha * alpha / (rho * rho);
            h[0][0] += f * (rho - 2.0 * u[0] * u[0]);
            h[1][1] += f * (rho - 2.0 * u[1] * u[1]);
            h[0][1] -= f * 2.0 * u[0] * u[1];
        }
        h[1][0] = h[0][1];
        Ok(h)
    }
}

/// Reduced Hamiltonian for nonzero linear impulse, up to an additive constant.
pub fn h_zero(x: f64, y: f64, gamma1: f64, gamma2: f64) -> Result<f64> {
    ZeroCircReducedState::new(x, y, gamma1, gamma2).hamiltonian()
}

/// `(Γ₁² + Γ₁Γ₂ + Γ₂²)/2 · log(X² + Y²)` for vanishing linear impulse.
pub fn h_degenerate(x: f64, y: f64, gamma1: f64, gamma2: f64) -> Result<f64> {
    ZeroCircReducedState::degenerate(x, y, gamma1, gamma2).hamiltonian()
}

/// `X` of the three singular points on `Y = 0`; `S₁₂` is the origin.
pub fn zero_singularities(gamma1: f64, gamma2: f64) -> [(Pair, f64); 3] {
    let s = gamma1 + gamma2;
    [(Pair::P12, 0.0), (Pair::P13, s / gamma2), (Pair::P23, -s / gamma1)]
}

/// Velocity of `Z = X + iY` from the full equations of motion.
pub fn zero_pushforward(s: &ZeroCircReducedState) -> Result<(f64, f64)> {
    let cfg = from_zero_reduced(s, &ZeroCircGauge::identity())?;
    let v = vortex_velocities(&cfg)?;
    let dz = v[0] - v[1];
    Ok((dz.re, dz.im))
}

/// Constant `c` in `dX/dt = c ∂h/∂Y`, `dY/dt = −c ∂h/∂X`, fitted against the
/// full dynamics at a reference point with a large gradient.
pub fn bracket_constant(gamma1: f64, gamma2: f64, kind: ZeroCircKind) -> Result<f64> {
    let refs = [(0.31, 0.73), (-0.47, 1.29), (1.13, -0.61), (0.2, 2.5)];
    let mut best: Option<(f64, f64)> = None;
    for (x, y) in refs {
        let s = ZeroCircReducedState { x, y, gamma1, gamma2, kind };
        let Ok((hx, hy)) = s.gradient() else { continue };
        let norm = hx * hx + hy * hy;
        if best.is_none_or(|b| norm > b.0) {
            let (vx, vy) = zero_pushforward(&s)?;
            best = Some((norm, (vx * hy - vy * hx) / norm));
        }
    }
    best.map(|b| b.1).ok_or_else(|| VortexError::Precondition("no admissible calibration point".into()))
}

pub fn zero_vector_field(s: &ZeroCircReducedState) -> Result<(f64, f64)> {
    let c = bracket_constant(s.gamma1, s.gamma2, s.kind)?;
    let (hx, hy) = s.gradient()?;
    Ok((c * hy, -c * hx))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroEquilibrium {
    pub x: f64,
    pub y: f64,
    pub hessian_det: f64,
    pub classification: Stability,
    pub h: f64,
}

/// The two equilateral equilibria, upper one first.
pub fn zero_equilibria(gamma1: f64, gamma2: f64) -> Result<[ZeroEquilibrium; 2]> {
    check_zero_sum(&[gamma1, gamma2, -gamma1 - gamma2])?;
    let s = gamma1 + gamma2;
    if s == 0.0 {
        return Err(VortexError::Precondition("Γ₁ + Γ₂ must be nonzero".into()));
    }
    let q = gamma1 * gamma1 + gamma1 * gamma2 + gamma2 * gamma2;
    let x = (gamma2 * gamma2 - gamma1 * gamma1) / (2.0 * q);
    let y = 3f64.sqrt() * s * s / (2.0 * q);
    [y, -y].map(|y| {
        let st = ZeroCircReducedState::new(x, y, gamma1, gamma2);
        let h = st.hessian()?;
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        let scale = h[0][0].abs().max(h[1][1].abs()).max(h[0][1].abs());
        let classification = if det.abs() <= 1e-12 * scale * scale {
            Stability::Degenerate
        } else if det < 0.0 {
            Stability::Saddle
        } else {
            Stability::Center
        };
        Ok(ZeroEquilibrium { x, y, hessian_det: det, classification, h: st.hamiltonian()? })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()
    .map(|v| [v[0], v[1]])
}
