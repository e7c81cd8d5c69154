use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::trace::{Goal, TraceEnd, Tracer};
use crate::circulation::Pair;
use crate::equilibria::{reduced_jacobian, Equilibrium, Stability};
use crate::error::{Result, VortexError};
use crate::reduction::{reduced_hamiltonian, surface_scale};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OrbitKind {
    Periodic,
    Heteroclinic,
    Homoclinic,
    Ray,
    Unbounded,
}

impl OrbitKind {
    pub fn name(self) -> &'static str {
        match self {
            OrbitKind::Periodic => "periodic",
            OrbitKind::Heteroclinic => "heteroclinic",
            OrbitKind::Homoclinic => "homoclinic",
            OrbitKind::Ray => "ray",
            OrbitKind::Unbounded => "unbounded",
        }
    }

    pub fn is_separatrix(self) -> bool {
        matches!(self, OrbitKind::Heteroclinic | OrbitKind::Homoclinic)
    }
}

/// A sampled orbit on the phase surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitCurve {
    pub kind: OrbitKind,
    /// Traced from a saddle rather than from a seed.
    pub separatrix: bool,
    pub samples: Vec<[f64; 3]>,
    pub h_level: f64,
    /// Largest `|h − h_level|` along the curve relative to the energy scale.
    pub max_h_drift: f64,
    /// Largest quadric residual relative to the squared surface scale.
    pub max_quadric_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BranchEnd {
    /// Came back to the saddle it left.
    Returned,
    /// Reached the saddle with this index in the list of other saddles.
    Saddle(usize),
    Singularity(Pair),
    Escaped,
    /// Ran out of time without reaching any of the above.
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparatrixBranch {
    pub unstable: bool,
    /// Side of the saddle the branch leaves from (`±1` along the eigenvector).
    pub side: f64,
    pub end: BranchEnd,
    pub curve: OrbitCurve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparatrixOptions {
    /// Launch offset relative to the surface scale.
    pub epsilon: f64,
    /// Arrival radius around saddles relative to the surface scale.
    pub arrival: f64,
    /// Escape radius relative to the surface scale.
    pub escape: f64,
    pub tol: f64,
    /// Integration time limit in units of the saddle's e-folding time.
    pub time_limit: f64,
    pub max_steps: usize,
}

impl Default for SeparatrixOptions {
    fn default() -> Self {
        SeparatrixOptions { epsilon: 1e-7, arrival: 1e-3, escape: 1e6, tol: 1e-11, time_limit: 2000.0, max_steps: 400_000 }
    }
}

/// Null vector of `J − λI` for a simple real eigenvalue `λ`.
fn eigenvector(j: &Matrix3<f64>, lambda: f64) -> [f64; 3] {
    let m = j - Matrix3::identity() * lambda;
    let rows: Vec<Vector3<f64>> = (0..3).map(|i| m.row(i).transpose()).collect();
    let mut best = Vector3::zeros();
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        let c = rows[a].cross(&rows[b]);
        if c.norm() > best.norm() {
            best = c;
        }
    }
    let n = best.norm();
    [best[0] / n, best[1] / n, best[2] / n]
}

/// Positive eigenvalue of a saddle with its unstable and stable directions.
pub fn saddle_directions(eq: &Equilibrium) -> Result<(f64, [f64; 3], [f64; 3])> {
    if eq.classification != Stability::Saddle {
        return Err(VortexError::Precondition(format!("separatrices need a saddle, got {}", eq.classification)));
    }
    let j = reduced_jacobian(&eq.state)?;
    let lambda = eq.eigenvalues.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max);
    if !(lambda > 0.0) {
        return Err(VortexError::Precondition("saddle without a positive eigenvalue".into()));
    }
    Ok((lambda, eigenvector(&j, lambda), eigenvector(&j, -lambda)))
}

/// The four branches of the stable and unstable manifolds of `eq`; stable
/// branches are traced backwards and stored in forward-time order.
pub fn separatrices(eq: &Equilibrium, others: &[Equilibrium], opts: &SeparatrixOptions) -> Result<Vec<SeparatrixBranch>> {
    let (lambda, vu, vs) = saddle_directions(eq)?;
    let scale = surface_scale(&eq.state.circulations, eq.state.theta);
    let mut points = vec![eq.state.xyz()];
    points.extend(others.iter().map(|e| e.state.xyz()));
    let h_level = reduced_hamiltonian(&eq.state)?;
    let tracer = Tracer {
        base: &eq.state,
        tol: opts.tol,
        scale,
        escape_radius: opts.escape * scale,
        max_steps: opts.max_steps,
    };
    let launches = [(true, 1.0), (true, -1.0), (false, 1.0), (false, -1.0)];
    launches
        .par_iter()
        .map(|&(unstable, side)| {
            let v = if unstable { vu } else { vs };
            let p = eq.state.xyz();
            let eps = opts.epsilon * scale * side;
            let start = [p[0] + eps * v[0], p[1] + eps * v[1], p[2] + eps * v[2]];
            let dir = if unstable { 1.0 } else { -1.0 };
            let goal = Goal::Saddles { points: &points, start: 0, delta: opts.arrival * scale };
            let mut trace = tracer.run(start, dir, opts.time_limit / lambda, goal)?;
            let end = match trace.end {
                TraceEnd::Saddle(0) => BranchEnd::Returned,
                TraceEnd::Saddle(k) => BranchEnd::Saddle(k - 1),
                TraceEnd::Singularity(pair) => BranchEnd::Singularity(pair),
                TraceEnd::Escaped => BranchEnd::Escaped,
                TraceEnd::Closed | TraceEnd::TimeLimit => BranchEnd::Unresolved,
            };
            let kind = match end {
                BranchEnd::Returned => OrbitKind::Homoclinic,
                BranchEnd::Saddle(_) => OrbitKind::Heteroclinic,
                BranchEnd::Singularity(_) => OrbitKind::Ray,
                BranchEnd::Escaped | BranchEnd::Unresolved => OrbitKind::Unbounded,
            };
            trace.samples.insert(0, p);
            if !unstable {
                trace.samples.reverse();
            }
            Ok(SeparatrixBranch {
                unstable,
                side,
                end,
                curve: OrbitCurve {
                    kind,
                    separatrix: true,
                    samples: trace.samples,
                    h_level,
                    max_h_drift: trace.max_h_drift,
                    max_quadric_residual: trace.max_quadric,
                },
            })
        })
        .collect()
}
