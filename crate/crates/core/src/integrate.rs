use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Result, VortexError};
use crate::model::{conserved_quantities, vortex_velocities, ConservedQuantities, VortexConfiguration};
use crate::ode::{dopri5, Finish, IntegratorOptions, StepControl};

/// Why an integration ended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Termination {
    Completed,
    /// Two vortices came closer than the collision floor (one-based labels).
    NearCollision { t: f64, pair: (usize, usize), distance: f64 },
    /// A reduced trajectory approached a singularity of the reduced Hamiltonian.
    NearSingularity { t: f64, pair: crate::Pair, distance: f64 },
    StepLimit { t: f64 },
    Escaped { t: f64, radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<S, D> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub diagnostics: Vec<D>,
    pub termination: Termination,
}

impl<S, D> Trajectory<S, D> {
    pub fn len(&self) -> usize {
        self.times.len()
    }
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
    pub fn completed(&self) -> bool {
        self.termination == Termination::Completed
    }
}

/// Invariant residuals of one sample of a full trajectory.
///
/// Drifts are relative to reference scales fixed at the initial time:
/// `max(|H₀|, Σ|Γ_iΓ_j|)` for the energy, `Σ|Γ_j||z_j|` for the linear
/// impulse and `Σ|Γ_j||z_j|²` for the angular impulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FullDiagnostics {
    pub quantities: ConservedQuantities,
    pub h_drift: f64,
    pub mx_drift: f64,
    pub my_drift: f64,
    pub theta_drift: f64,
    pub min_distance: f64,
}

impl FullDiagnostics {
    pub fn max_drift(&self) -> f64 {
        self.h_drift.max(self.mx_drift).max(self.my_drift).max(self.theta_drift)
    }
}

pub type FullTrajectory = Trajectory<VortexConfiguration, FullDiagnostics>;

#[derive(Debug, Clone, PartialEq)]
pub struct FullOptions {
    pub tol: f64,
    /// Absolute minimum pair distance; defaults to 1e-9 × the geometric mean
    /// of the initial pair distances.
    pub collision_floor: Option<f64>,
    /// Sample times; when absent every accepted step is recorded.
    pub output_times: Option<Vec<f64>>,
    pub max_steps: usize,
}

impl FullOptions {
    pub fn new(tol: f64) -> Self {
        FullOptions { tol, collision_floor: None, output_times: None, max_steps: 2_000_000 }
    }
}

struct Reference {
    q0: ConservedQuantities,
    h_scale: f64,
    m_scale: f64,
    theta_scale: f64,
}

impl Reference {
    fn new(cfg: &VortexConfiguration) -> Result<Self> {
        let q0 = conserved_quantities(cfg)?;
        let g = &cfg.circulations;
        let mut pair_scale = 0.0;
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                pair_scale += (g[i] * g[j]).abs();
            }
        }
        let m_scale: f64 = cfg.positions.iter().zip(g).map(|(z, g)| g.abs() * z.norm()).sum();
        let theta_scale: f64 = cfg.positions.iter().zip(g).map(|(z, g)| g.abs() * z.norm_sqr()).sum();
        Ok(Reference {
            q0,
            h_scale: q0.h.abs().max(pair_scale).max(f64::MIN_POSITIVE),
            m_scale: m_scale.max(f64::MIN_POSITIVE),
            theta_scale: theta_scale.max(f64::MIN_POSITIVE),
        })
    }

    fn diagnose(&self, cfg: &VortexConfiguration) -> Result<FullDiagnostics> {
        let q = conserved_quantities(cfg)?;
        Ok(FullDiagnostics {
            quantities: q,
            h_drift: (q.h - self.q0.h).abs() / self.h_scale,
            mx_drift: (q.m.re - self.q0.m.re).abs() / self.m_scale,
            my_drift: (q.m.im - self.q0.m.im).abs() / self.m_scale,
            theta_drift: (q.theta - self.q0.theta).abs() / self.theta_scale,
            min_distance: cfg.closest_pair().map_or(f64::INFINITY, |p| p.0),
        })
    }
}

/// Integrates the full N-vortex equations with invariant monitoring.
pub fn integrate_full(cfg: &VortexConfiguration, t_span: (f64, f64), tol: f64) -> Result<FullTrajectory> {
    integrate_full_with(cfg, t_span, &FullOptions::new(tol))
}

pub fn integrate_full_with(
    cfg: &VortexConfiguration,
    t_span: (f64, f64),
    opts: &FullOptions,
) -> Result<FullTrajectory> {
    if !(opts.tol > 0.0) {
        return Err(VortexError::InvalidInput("tolerance must be positive".into()));
    }
    cfg.check_distinct()?;
    let reference = Reference::new(cfg)?;
    let floor = match opts.collision_floor {
        Some(f) => f,
        None => {
            let d = cfg.pair_distances_sq();
            if d.is_empty() {
                0.0
            } else {
                let mean_log = d.iter().map(|v| 0.5 * v.ln()).sum::<f64>() / d.len() as f64;
                1e-9 * mean_log.exp()
            }
        }
    };
    let mut traj = Trajectory {
        times: vec![t_span.0],
        states: vec![cfg.clone()],
        diagnostics: vec![reference.diagnose(cfg)?],
        termination: Termination::Completed,
    };
    let landing = opts.output_times.clone().unwrap_or_default();
    let mut ode_opts = IntegratorOptions::with_tol(opts.tol);
    ode_opts.max_steps = opts.max_steps;
    let template = cfg.clone();
    let mut failure: Option<VortexError> = None;

    let outcome = dopri5(
        |_, y, dy| {
            let v = vortex_velocities(&template.with_flat(y))?;
            for (k, vk) in v.iter().enumerate() {
                dy[2 * k] = vk.re;
                dy[2 * k + 1] = vk.im;
            }
            Ok(())
        },
        t_span.0,
        &cfg.to_flat(),
        t_span.1,
        &landing,
        &ode_opts,
        |t, y, record| {
            let state = template.with_flat(y);
            let (dist, i, j) = state.closest_pair().unwrap_or((f64::INFINITY, 0, 0));
            let near = dist < floor;
            if record || near {
                match reference.diagnose(&state) {
                    Ok(d) => {
                        traj.times.push(t);
                        traj.states.push(state);
                        traj.diagnostics.push(d);
                    }
                    Err(e) => {
                        failure = Some(e);
                        return StepControl::Stop;
                    }
                }
            }
            if near {
                traj.termination = Termination::NearCollision { t, pair: (i + 1, j + 1), distance: dist };
                return StepControl::Stop;
            }
            StepControl::Continue
        },
    );
    if let Some(e) = failure {
        return Err(e);
    }
    match outcome {
        Ok(o) => {
            if o.finish == Finish::StepLimit {
                traj.termination = Termination::StepLimit { t: o.t };
            }
            Ok(traj)
        }
        Err(VortexError::SingularConfiguration(i, j)) => {
            let t = *traj.times.last().unwrap_or(&t_span.0);
            traj.termination = Termination::NearCollision { t, pair: (i, j), distance: 0.0 };
            Ok(traj)
        }
        Err(e) => Err(e),
    }
}

/// Formats a float with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV with header `t,x1,y1,...,xN,yN,H,Mx,My,Theta`.
pub fn write_full_csv<W: Write>(traj: &FullTrajectory, mut w: W) -> std::io::Result<()> {
    let n = traj.states.first().map_or(0, |s| s.len());
    let mut header = vec!["t".to_string()];
    for k in 1..=n {
        header.push(format!("x{k}"));
        header.push(format!("y{k}"));
    }
    header.extend(["H", "Mx", "My", "Theta"].map(String::from));
    writeln!(w, "{}", header.join(","))?;
    for ((t, s), d) in traj.times.iter().zip(&traj.states).zip(&traj.diagnostics) {
        let mut row = vec![fmt17(*t)];
        for z in &s.positions {
            row.push(fmt17(z.re));
            row.push(fmt17(z.im));
        }
        let q = d.quantities;
        row.extend([fmt17(q.h), fmt17(q.m.re), fmt17(q.m.im), fmt17(q.theta)]);
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}
