use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{bracket_constant, ZeroCircKind, ZeroCircReducedState};
use crate::circulation::Pair;
use crate::error::{Result, VortexError};
use crate::integrate::{fmt17, Termination, Trajectory};
use crate::ode::{dopri5, Finish, IntegratorOptions, StepControl};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroDiagnostics {
    pub h: f64,
    /// `|h − h₀|` relative to `max(|h₀|, Σ|Γ_iΓ_j|)`.
    pub h_drift: f64,
    pub min_pair_distance: f64,
}

pub type ZeroTrajectory = Trajectory<ZeroCircReducedState, ZeroDiagnostics>;

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroOptions {
    pub tol: f64,
    pub output_times: Option<Vec<f64>>,
    /// Stop when a gauged pair distance drops below this; defaults to `1e-9`
    /// times the geometric mean of the initial distances.
    pub singular_floor: Option<f64>,
    pub escape_radius: Option<f64>,
    pub max_steps: usize,
}

impl ZeroOptions {
    pub fn new(tol: f64) -> Self {
        ZeroOptions { tol, output_times: None, singular_floor: None, escape_radius: None, max_steps: 1_000_000 }
    }
}

/// Pair distances `(|z₁₂|, |z₁₃|, |z₂₃|)` in gauged units.
pub fn gauged_pair_distances(s: &ZeroCircReducedState) -> [f64; 3] {
    let (g1, g2) = (s.gamma1, s.gamma2);
    let sum = g1 + g2;
    let r12 = s.x.hypot(s.y);
    let shift = match s.kind {
        ZeroCircKind::Generic => 1.0,
        ZeroCircKind::Degenerate => 0.0,
    };
    let r13 = (g2 / sum * s.x - shift).hypot(g2 / sum * s.y);
    let r23 = (g1 / sum * s.x + shift).hypot(g1 / sum * s.y);
    [r12, r13, r23]
}

fn min_pair(s: &ZeroCircReducedState) -> (f64, Pair) {
    let d = gauged_pair_distances(s);
    let k = (0..3).min_by(|&a, &b| d[a].total_cmp(&d[b])).unwrap_or(0);
    (d[k], Pair::ALL[k])
}

pub fn integrate_zero(s: &ZeroCircReducedState, t_span: (f64, f64), tol: f64) -> Result<ZeroTrajectory> {
    integrate_zero_with(s, t_span, &ZeroOptions::new(tol))
}

pub fn integrate_zero_with(s: &ZeroCircReducedState, t_span: (f64, f64), opts: &ZeroOptions) -> Result<ZeroTrajectory> {
    if !(opts.tol > 0.0) {
        return Err(VortexError::InvalidInput("tolerance must be positive".into()));
    }
    let c = bracket_constant(s.gamma1, s.gamma2, s.kind)?;
    let h0 = s.hamiltonian()?;
    let [g1, g2, g3] = s.circulations();
    let h_scale = h0.abs().max((g1 * g2).abs() + (g1 * g3).abs() + (g2 * g3).abs());
    let floor = opts.singular_floor.unwrap_or_else(|| {
        let d = gauged_pair_distances(s);
        let mean_log = d.iter().map(|v| v.ln()).sum::<f64>() / 3.0;
        1e-9 * mean_log.exp()
    });
    let diagnose = |st: &ZeroCircReducedState| -> Result<ZeroDiagnostics> {
        let h = st.hamiltonian()?;
        Ok(ZeroDiagnostics { h, h_drift: (h - h0).abs() / h_scale, min_pair_distance: min_pair(st).0 })
    };
    let mut traj = Trajectory {
        times: vec![t_span.0],
        states: vec![*s],
        diagnostics: vec![diagnose(s)?],
        termination: Termination::Completed,
    };
    let landing = opts.output_times.clone().unwrap_or_default();
    let mut ode_opts = IntegratorOptions::with_tol(opts.tol);
    ode_opts.max_steps = opts.max_steps;
    let mut failure = None;

    let outcome = dopri5(
        |_, y, dy| {
            let (hx, hy) = s.with_xy(y[0], y[1]).gradient()?;
            dy[0] = c * hy;
            dy[1] = -c * hx;
            Ok(())
        },
        t_span.0,
        &[s.x, s.y],
        t_span.1,
        &landing,
        &ode_opts,
        |t, y, record| {
            let st = s.with_xy(y[0], y[1]);
            let (dist, pair) = min_pair(&st);
            let near = dist < floor;
            let radius = st.x.hypot(st.y);
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
            StepControl::Continue
        },
    );
    let last_t = *traj.times.last().unwrap_or(&t_span.0);
    match (failure, outcome) {
        (Some(VortexError::Singularity(pair)), _) | (None, Err(VortexError::Singularity(pair))) => {
            traj.termination = Termination::NearSingularity { t: last_t, pair, distance: 0.0 };
            Ok(traj)
        }
        (Some(VortexError::TripleCollision), _) | (None, Err(VortexError::TripleCollision)) => {
            traj.termination = Termination::NearSingularity { t: last_t, pair: Pair::P12, distance: 0.0 };
            Ok(traj)
        }
        (Some(e), _) | (None, Err(e)) => Err(e),
        (None, Ok(o)) => {
            if o.finish == Finish::StepLimit {
                traj.termination = Termination::StepLimit { t: o.t };
            }
            Ok(traj)
        }
    }
}

/// CSV with header `t,X,Y,h`.
pub fn write_zero_csv<W: Write>(traj: &ZeroTrajectory, mut w: W) -> std::io::Result<()> {
    writeln!(w, "t,X,Y,h")?;
    for ((t, s), d) in traj.times.iter().zip(&traj.states).zip(&traj.diagnostics) {
        writeln!(w, "{},{},{},{}", fmt17(*t), fmt17(s.x), fmt17(s.y), fmt17(d.h))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::{integrate_full_with, FullOptions};
    use crate::model::VortexConfiguration;
    use crate::zero_circ::{from_zero_reduced, to_zero_reduced, ZeroCircGauge};
    use num_complex::Complex64;

    #[test]
    fn h_is_conserved() {
        for (x, y) in [(0.4, 0.9), (-1.0, 0.3), (2.0, -1.5)] {
            let s = ZeroCircReducedState::new(x, y, 2.0, 1.0);
            let traj = integrate_zero(&s, (0.0, 50.0), 1e-12).unwrap();
            let worst = traj.diagnostics.iter().map(|d| d.h_drift).fold(0.0, f64::max);
            assert!(worst < 1e-9, "start ({x}, {y}): drift {worst}");
        }
    }

    #[test]
    fn matches_full_dynamics() {
        let cfg = VortexConfiguration::new(
            vec![Complex64::new(0.3, 0.8), Complex64::new(-0.5, 0.1), Complex64::new(0.9, -0.7)],
            vec![2.0, 1.0, -3.0],
        )
        .unwrap();
        let r = to_zero_reduced(&cfg).unwrap();
        let ts: Vec<f64> = (1..=20).map(|k| k as f64).collect();
        let mut fo = FullOptions::new(1e-12);
        fo.output_times = Some(ts.clone());
        let full = integrate_full_with(&cfg, (0.0, 20.0), &fo).unwrap();
        let tau = r.gauge.time_scale();
        let mut zo = ZeroOptions::new(1e-12);
        zo.output_times = Some(ts.iter().map(|t| t / tau).collect());
        let red = integrate_zero_with(&r.state, (0.0, 20.0 / tau), &zo).unwrap();
        assert_eq!(full.len(), red.len());
        for (f, s) in full.states.iter().zip(&red.states) {
            let want = f.pair_distances_sq();
            let got = gauged_pair_distances(s).map(|d| (d * r.gauge.scale).powi(2));
            for k in 0..3 {
                assert!((got[k] - want[k]).abs() < 1e-6 * want[k], "{got:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn degenerate_flow_is_rotation() {
        let s = ZeroCircReducedState::degenerate(1.2, -0.4, 1.0, 2.0);
        let traj = integrate_zero(&s, (0.0, 30.0), 1e-12).unwrap();
        let r0 = s.x.hypot(s.y);
        for st in &traj.states {
            assert!((st.x.hypot(st.y) - r0).abs() < 1e-10);
        }
        let cfg = from_zero_reduced(&s, &ZeroCircGauge::identity()).unwrap();
        assert!(to_zero_reduced(&cfg).unwrap().state.kind == ZeroCircKind::Degenerate);
    }

    #[test]
    fn csv_header() {
        let traj = integrate_zero(&ZeroCircReducedState::new(0.4, 0.9, 2.0, 1.0), (0.0, 1.0), 1e-9).unwrap();
        let mut buf = Vec::new();
        write_zero_csv(&traj, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("t,X,Y,h\n"));
    }
}
