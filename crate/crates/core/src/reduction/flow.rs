use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hamiltonian::{pair_distances_sq, reduced_gradient, reduced_hamiltonian};
use super::jacobi::{kappas, MomentumCoordinates};
use super::surface::{quadric_residual, surface_scale};
use super::ReducedState;
use crate::circulation::{symmetric_invariants, Circulations, Pair};
use crate::error::{Result, VortexError};
use crate::integrate::{fmt17, Termination, Trajectory};
use crate::model::VortexConfiguration;
use crate::ode::{dopri5, Finish, IntegratorOptions, StepControl};

/// `(Ẋ, Ẏ, Ż) = (−4h_Z Y, 4h_Z X − (γ₁/γ₃) h_X Z, 4h_X Y)`
pub fn reduced_vector_field(s: &ReducedState) -> Result<[f64; 3]> {
    let (hx, hz) = reduced_gradient(s)?;
    let g = symmetric_invariants(&s.circulations);
    let ratio = g.gamma1 / g.gamma3;
    Ok([-4.0 * hz * s.y, 4.0 * hz * s.x - ratio * hx * s.z, 4.0 * hx * s.y])
}

/// The vector field in momentum coordinates, for circulations in the
/// labeling that produced `m`.
pub fn mu_vector_field(m: &MomentumCoordinates, c: &Circulations) -> Result<[f64; 4]> {
    let [k1, k2, _] = kappas(c)?;
    let [g1, g2, g3] = c.as_array();
    let s = g1 + g2;
    let (a1, a2) = (g2 / s, g1 / s);
    let d13 = m.mu2 + a1 * a1 * m.mu1 + 2.0 * a1 * m.mu3;
    let d23 = m.mu2 + a2 * a2 * m.mu1 - 2.0 * a2 * m.mu3;
    for (d, p) in [(m.mu1, Pair::P12), (d13, Pair::P13), (d23, Pair::P23)] {
        if d <= 0.0 {
            return Err(VortexError::Singularity(p));
        }
    }
    let (w12, w13, w23) = (g1 * g2, g1 * g3, g2 * g3);
    let h1 = -0.5 * (w12 / m.mu1 + w13 * a1 * a1 / d13 + w23 * a2 * a2 / d23);
    let h2 = -0.5 * (w13 / d13 + w23 / d23);
    let h3 = -(w13 * a1 / d13 - w23 * a2 / d23);
    Ok([
        2.0 / k1 * h3 * m.mu4,
        -2.0 / k2 * h3 * m.mu4,
        2.0 * (h2 / k2 - h1 / k1) * m.mu4,
        2.0 * m.mu3 * (h1 / k1 - h2 / k2) + h3 * (m.mu2 / k1 - m.mu1 / k2),
    ])
}

/// A configuration with centre of vorticity at the origin and `Z₂` at angle
/// `gauge`, in the labeling of the state's circulations.
pub fn reconstruct(s: &ReducedState, gauge: f64) -> Result<VortexConfiguration> {
    let c = &s.circulations;
    let [k1, k2, gamma1] = kappas(c)?;
    let scale = surface_scale(c, s.theta).max(s.z.abs()).max(s.x.hypot(s.y));
    let res = quadric_residual(s);
    if !(res.abs() <= 1e-9 * scale * scale) {
        return Err(VortexError::InvalidInput(format!("state is off the quadric (residual {res:e})")));
    }
    let mu1 = (s.theta + s.z) / (2.0 * k1);
    let mu2 = (s.theta - s.z) / (2.0 * k2);
    let tol = 1e-12 * scale;
    if mu1 * 2.0 * k1.abs() < -tol || mu2 * 2.0 * k2.abs() < -tol {
        return Err(VortexError::OffSurface(format!("negative squared Jacobi length (μ₁ = {mu1:e}, μ₂ = {mu2:e})")));
    }
    let (r1, r2) = (mu1.max(0.0).sqrt(), mu2.max(0.0).sqrt());
    let big_z2 = Complex64::from_polar(r2, gauge);
    let big_z1 = if s.x == 0.0 && s.y == 0.0 {
        Complex64::from_polar(r1, gauge)
    } else {
        Complex64::from_polar(r1, gauge - s.y.atan2(s.x))
    };
    let [g1, g2, g3] = c.as_array();
    let sum = g1 + g2;
    let inner = big_z2 * (g3 / gamma1);
    let z3 = -big_z2 * (sum / gamma1);
    let z1 = inner + big_z1 * (g2 / sum);
    let z2 = inner - big_z1 * (g1 / sum);
    Ok(VortexConfiguration::three(c, [z1, z2, z3]))
}

/// Newton steps along the gradient of the quadric until the residual is at
/// rounding level.
pub fn project_to_quadric(s: &ReducedState) -> ReducedState {
    let g = symmetric_invariants(&s.circulations);
    let k = 4.0 * g.gamma3 / g.gamma1;
    let mut p = s.xyz();
    for _ in 0..4 {
        let q = s.theta * s.theta - p[2] * p[2] - k * (p[0] * p[0] + p[1] * p[1]);
        let grad = [-2.0 * k * p[0], -2.0 * k * p[1], -2.0 * p[2]];
        let n2: f64 = grad.iter().map(|v| v * v).sum();
        if n2 == 0.0 || q == 0.0 {
            break;
        }
        for i in 0..3 {
            p[i] -= q / n2 * grad[i];
        }
    }
    s.with_xyz(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedDiagnostics {
    pub h: f64,
    /// Relative to `max(|h₀|, Σ|Γ_iΓ_j|)`.
    pub h_drift: f64,
    /// `Θ` recomputed from the quadric.
    pub theta: f64,
    pub quadric_residual: f64,
    pub min_pair_distance: f64,
}

pub type ReducedTrajectory = Trajectory<ReducedState, ReducedDiagnostics>;

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedOptions {
    pub tol: f64,
    /// Re-project onto the quadric whenever the relative residual exceeds `10 × tol`.
    pub project: bool,
    pub output_times: Option<Vec<f64>>,
    /// Minimum physical pair distance; defaults to 1e-9 × the geometric mean
    /// of the initial pair distances.
    pub singular_floor: Option<f64>,
    /// Stop when `|(X, Y, Z)|` exceeds this.
    pub escape_radius: Option<f64>,
    pub max_steps: usize,
}

impl ReducedOptions {
    pub fn new(tol: f64) -> Self {
        ReducedOptions {
            tol,
            project: false,
            output_times: None,
            singular_floor: None,
            escape_radius: None,
            max_steps: 2_000_000,
        }
    }
}

pub fn integrate_reduced(s: &ReducedState, t_span: (f64, f64), tol: f64) -> Result<ReducedTrajectory> {
    integrate_reduced_with(s, t_span, &ReducedOptions::new(tol))
}

fn min_pair(s: &ReducedState) -> (f64, Pair) {
    let d = pair_distances_sq(s);
    let mut best = (f64::INFINITY, Pair::P12);
    for (k, v) in d.iter().enumerate() {
        let r = v.abs().sqrt();
        if r < best.0 {
            best = (r, Pair::ALL[k]);
        }
    }
    best
}

pub fn integrate_reduced_with(
    s: &ReducedState,
    t_span: (f64, f64),
    opts: &ReducedOptions,
) -> Result<ReducedTrajectory> {
    if !(opts.tol > 0.0) {
        return Err(VortexError::InvalidInput("tolerance must be positive".into()));
    }
    let h0 = reduced_hamiltonian(s)?;
    let [g1, g2, g3] = s.circulations.as_array();
    let h_scale = h0.abs().max((g1 * g2).abs() + (g1 * g3).abs() + (g2 * g3).abs());
    let inv = symmetric_invariants(&s.circulations);
    let k = 4.0 * inv.gamma3 / inv.gamma1;
    let scale = surface_scale(&s.circulations, s.theta);
    let floor = opts.singular_floor.unwrap_or_else(|| {
        let d = pair_distances_sq(s);
        let mean_log = d.iter().map(|v| 0.25 * v.abs().ln()).sum::<f64>() / 3.0;
        1e-9 * mean_log.exp()
    });
    let diagnose = |st: &ReducedState| -> Result<ReducedDiagnostics> {
        let h = reduced_hamiltonian(st)?;
        let r2 = st.z * st.z + k * (st.x * st.x + st.y * st.y);
        let sign = if s.theta < 0.0 { -1.0 } else { 1.0 };
        Ok(ReducedDiagnostics {
            h,
            h_drift: (h - h0).abs() / h_scale,
            theta: sign * r2.abs().sqrt(),
            quadric_residual: quadric_residual(st),
            min_pair_distance: min_pair(st).0,
        })
    };

    let mut traj = Trajectory {
        times: vec![t_span.0],
        states: vec![s.clone()],
        diagnostics: vec![diagnose(s)?],
        termination: Termination::Completed,
    };
    let landing = opts.output_times.clone().unwrap_or_default();
    let mut ode_opts = IntegratorOptions::with_tol(opts.tol);
    ode_opts.max_steps = opts.max_steps;
    let mut failure: Option<VortexError> = None;

    let outcome = dopri5(
        |_, y, dy| {
            let v = reduced_vector_field(&s.with_xyz([y[0], y[1], y[2]]))?;
            dy.copy_from_slice(&v);
            Ok(())
        },
        t_span.0,
        &s.xyz(),
        t_span.1,
        &landing,
        &ode_opts,
        |t, y, record| {
            let mut control = StepControl::Continue;
            let mut st = s.with_xyz([y[0], y[1], y[2]]);
            if opts.project && quadric_residual(&st).abs() > 10.0 * opts.tol * scale * scale {
                st = project_to_quadric(&st);
                y.copy_from_slice(&st.xyz());
                control = StepControl::Modified;
            }
            let (dist, pair) = min_pair(&st);
            let near = dist < floor;
            let radius = (st.x * st.x + st.y * st.y + st.z * st.z).sqrt();
            let escaped = opts.escape_radius.is_some_and(|r| radius > r);
            if record || near || escaped {
                match diagnose(&st) {
                    Ok(d) => {
                        traj.times.push(t);
                        traj.states.push(st);
                        traj.diagnostics.push(d);
                    }
                    Err(e) => {
                        failure = Some(e);
                        return StepControl::Stop;
                    }
                }
            }
            if near {
                traj.termination = Termination::NearSingularity { t, pair, distance: dist };
                return StepControl::Stop;
            }
            if escaped {
                traj.termination = Termination::Escaped { t, radius };
                return StepControl::Stop;
            }
            control
        },
    );
    if let Some(VortexError::Singularity(pair)) = failure {
        let t = *traj.times.last().unwrap_or(&t_span.0);
        traj.termination = Termination::NearSingularity { t, pair, distance: 0.0 };
        return Ok(traj);
    }
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
        Err(VortexError::Singularity(pair)) => {
            let t = *traj.times.last().unwrap_or(&t_span.0);
            let distance = traj.diagnostics.last().map_or(0.0, |d| d.min_pair_distance);
            traj.termination = Termination::NearSingularity { t, pair, distance };
            Ok(traj)
        }
        Err(e) => Err(e),
    }
}

/// CSV with header `t,X,Y,Z,h,quadric_residual`.
pub fn write_reduced_csv<W: Write>(traj: &ReducedTrajectory, mut w: W) -> std::io::Result<()> {
    writeln!(w, "t,X,Y,Z,h,quadric_residual")?;
    for ((t, s), d) in traj.times.iter().zip(&traj.states).zip(&traj.diagnostics) {
        let row = [*t, s.x, s.y, s.z, d.h, d.quadric_residual].map(fmt17);
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}
