use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circulation::Circulations;
use crate::error::{Result, VortexError};

/// Planar point vortices: positions `z_j = x_j + i y_j` and nonzero circulations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VortexConfiguration {
    pub positions: Vec<Complex64>,
    pub circulations: Vec<f64>,
}

impl VortexConfiguration {
    pub fn new(positions: Vec<Complex64>, circulations: Vec<f64>) -> Result<Self> {
        if positions.len() != circulations.len() {
            return Err(VortexError::InvalidInput(format!(
                "{} positions but {} circulations",
                positions.len(),
                circulations.len()
            )));
        }
        if let Some(k) = circulations.iter().position(|g| *g == 0.0 || !g.is_finite()) {
            return Err(VortexError::InvalidInput(format!("circulation {} must be finite and nonzero", k + 1)));
        }
        if positions.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(VortexError::InvalidInput("positions must be finite".into()));
        }
        Ok(VortexConfiguration { positions, circulations })
    }

    pub fn three(c: &Circulations, z: [Complex64; 3]) -> Self {
        VortexConfiguration { positions: z.to_vec(), circulations: c.as_array().to_vec() }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Circulations of a three-vortex configuration.
    pub fn circulations3(&self) -> Result<Circulations> {
        if self.len() != 3 {
            return Err(VortexError::Precondition(format!("expected 3 vortices, got {}", self.len())));
        }
        Circulations::new(self.circulations[0], self.circulations[1], self.circulations[2])
    }

    /// Errors with the first coincident pair, one-based.
    pub fn check_distinct(&self) -> Result<()> {
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                if (self.positions[i] - self.positions[j]).norm_sqr() == 0.0 {
                    return Err(VortexError::SingularConfiguration(i + 1, j + 1));
                }
            }
        }
        Ok(())
    }

    /// Smallest pairwise distance and the zero-based pair attaining it.
    pub fn closest_pair(&self) -> Option<(f64, usize, usize)> {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let d = (self.positions[i] - self.positions[j]).norm();
                if best.is_none_or(|b| d < b.0) {
                    best = Some((d, i, j));
                }
            }
        }
        best
    }

    /// Squared distances `|z_i − z_j|²` in the order (1,2), (1,3), ..., (N−1,N).
    pub fn pair_distances_sq(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                out.push((self.positions[i] - self.positions[j]).norm_sqr());
            }
        }
        out
    }

    /// Applies `z ↦ e^{iψ} z + a`.
    pub fn transformed(&self, psi: f64, a: Complex64) -> Self {
        let rot = Complex64::from_polar(1.0, psi);
        VortexConfiguration {
            positions: self.positions.iter().map(|z| rot * z + a).collect(),
            circulations: self.circulations.clone(),
        }
    }

    pub(crate) fn to_flat(&self) -> Vec<f64> {
        self.positions.iter().flat_map(|z| [z.re, z.im]).collect()
    }

    pub(crate) fn with_flat(&self, y: &[f64]) -> Self {
        VortexConfiguration {
            positions: y.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect(),
            circulations: self.circulations.clone(),
        }
    }
}

/// `ż_j = i Σ_{i≠j} Γ_i (z_j − z_i)/|z_j − z_i|²`
pub fn vortex_velocities(cfg: &VortexConfiguration) -> Result<Vec<Complex64>> {
    cfg.check_distinct()?;
    let z = &cfg.positions;
    let g = &cfg.circulations;
    let mut v = vec![Complex64::new(0.0, 0.0); z.len()];
    for j in 0..z.len() {
        for i in 0..z.len() {
            if i != j {
                let d = z[j] - z[i];
                v[j] += Complex64::i() * g[i] * d / d.norm_sqr();
            }
        }
    }
    Ok(v)
}

/// `H = −½ Σ_{i<j} Γ_i Γ_j log|z_i − z_j|²`
pub fn hamiltonian(cfg: &VortexConfiguration) -> Result<f64> {
    cfg.check_distinct()?;
    let z = &cfg.positions;
    let g = &cfg.circulations;
    let mut h = 0.0;
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            h -= 0.5 * g[i] * g[j] * (z[i] - z[j]).norm_sqr().ln();
        }
    }
    Ok(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservedQuantities {
    /// Linear impulse `Σ Γ_j z_j`.
    pub m: Complex64,
    /// Angular impulse `Σ Γ_j |z_j|²`.
    pub theta: f64,
    pub h: f64,
    /// Center of vorticity `M/γ₁`, absent when the total circulation vanishes.
    pub center: Option<Complex64>,
}

pub fn conserved_quantities(cfg: &VortexConfiguration) -> Result<ConservedQuantities> {
    let m: Complex64 = cfg.positions.iter().zip(&cfg.circulations).map(|(z, g)| z * g).sum();
    let theta = cfg.positions.iter().zip(&cfg.circulations).map(|(z, g)| g * z.norm_sqr()).sum();
    let total: f64 = cfg.circulations.iter().sum();
    let scale: f64 = cfg.circulations.iter().map(|g| g.abs()).sum();
    let center = if total.abs() > 1e-14 * scale { Some(m / total) } else { None };
    Ok(ConservedQuantities { m, theta, h: hamiltonian(cfg)?, center })
}

/// Canonical bracket `{F,G} = Σ_j (1/Γ_j)(∂F/∂x_j ∂G/∂y_j − ∂F/∂y_j ∂G/∂x_j)`
/// with partials taken by central differences of step `step`.
pub fn poisson_bracket<F, G>(cfg: &VortexConfiguration, f: F, g: G, step: f64) -> Result<f64>
where
    F: Fn(&VortexConfiguration) -> Result<f64>,
    G: Fn(&VortexConfiguration) -> Result<f64>,
{
    let df = finite_gradient(cfg, &f, step)?;
    let dg = finite_gradient(cfg, &g, step)?;
    Ok(cfg
        .circulations
        .iter()
        .enumerate()
        .map(|(j, gam)| (df[2 * j] * dg[2 * j + 1] - df[2 * j + 1] * dg[2 * j]) / gam)
        .sum())
}

/// Central-difference gradient with respect to `(x_1, y_1, ..., x_N, y_N)`.
pub fn finite_gradient<F>(cfg: &VortexConfiguration, f: &F, step: f64) -> Result<Vec<f64>>
where
    F: Fn(&VortexConfiguration) -> Result<f64>,
{
    let base = cfg.to_flat();
    let mut out = Vec::with_capacity(base.len());
    for k in 0..base.len() {
        let mut plus = base.clone();
        let mut minus = base.clone();
        plus[k] += step;
        minus[k] -= step;
        out.push((f(&cfg.with_flat(&plus))? - f(&cfg.with_flat(&minus))?) / (2.0 * step));
    }
    Ok(out)
}
