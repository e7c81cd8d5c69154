use crate::circulation::Pair;
use crate::error::{Result, VortexError};
use crate::ode::{dopri5, IntegratorOptions, StepControl};
use crate::reduction::{
    pair_distances_sq, project_to_quadric, quadric_residual, reduced_hamiltonian, reduced_vector_field, ReducedState,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum TraceEnd {
    /// Index into the saddle list of the goal.
    Saddle(usize),
    Singularity(Pair),
    Escaped,
    Closed,
    TimeLimit,
}

#[derive(Debug, Clone)]
pub(crate) struct Trace {
    pub samples: Vec<[f64; 3]>,
    pub end: TraceEnd,
    pub max_h_drift: f64,
    pub max_quadric: f64,
}

pub(crate) enum Goal<'a> {
    /// Stop within `delta` of a saddle; the starting saddle counts only after
    /// the trace has been `2·delta` away from it.
    Saddles { points: &'a [[f64; 3]], start: usize, delta: f64 },
    /// Stop after one revolution around the seed.
    Closure,
}

pub(crate) struct Tracer<'a> {
    pub base: &'a ReducedState,
    pub tol: f64,
    pub scale: f64,
    pub escape_radius: f64,
    pub max_steps: usize,
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// Distance from `p` to the segment `[a, b]`.
fn segment_distance(p: [f64; 3], a: [f64; 3], b: [f64; 3]) -> f64 {
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    let t = if len2 > 0.0 { (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    norm(sub(p, [a[0] + t * ab[0], a[1] + t * ab[1], a[2] + t * ab[2]]))
}

fn min_pair_distance(s: &ReducedState) -> (f64, Pair) {
    let d = pair_distances_sq(s);
    let k = (0..3).min_by(|&a, &b| d[a].abs().total_cmp(&d[b].abs())).unwrap_or(0);
    (d[k].abs().sqrt(), Pair::ALL[k])
}

impl Tracer<'_> {
    /// Follows the reduced flow from `start` in the direction of `dir = ±1`.
    pub fn run(&self, start: [f64; 3], dir: f64, t_max: f64, goal: Goal) -> Result<Trace> {
        let s0 = project_to_quadric(&self.base.with_xyz(start));
        let start = s0.xyz();
        let h0 = reduced_hamiltonian(&s0)?;
        let [g1, g2, g3] = s0.circulations.as_array();
        let h_scale = h0.abs().max((g1 * g2).abs() + (g1 * g3).abs() + (g2 * g3).abs());
        let floor = 1e-5 * min_pair_distance(&s0).0;
        let v0 = reduced_vector_field(&s0)?;
        let v0n = norm(v0);
        let heading = if v0n > 0.0 { v0.map(|v| dir * v / v0n) } else { [0.0; 3] };

        let mut trace = Trace { samples: vec![start], end: TraceEnd::TimeLimit, max_h_drift: 0.0, max_quadric: 0.0 };
        let mut departed = false;
        let mut farthest = 0.0f64;
        let mut phase = 0.0f64;
        let mut failure = None;
        let mut opts = IntegratorOptions::with_tol(self.tol);
        opts.max_steps = self.max_steps;
        let q_tol = 10.0 * self.tol * self.scale * self.scale;

        let outcome = dopri5(
            |_, y, dy| {
                let f = reduced_vector_field(&self.base.with_xyz([y[0], y[1], y[2]]))?;
                for k in 0..3 {
                    dy[k] = dir * f[k];
                }
                Ok(())
            },
            0.0,
            &start,
            t_max,
            &[],
            &opts,
            |_, y, _| {
                let mut control = StepControl::Continue;
                let mut st = self.base.with_xyz([y[0], y[1], y[2]]);
                if quadric_residual(&st).abs() > q_tol {
                    st = project_to_quadric(&st);
                    y.copy_from_slice(&st.xyz());
                    control = StepControl::Modified;
                }
                let p = st.xyz();
                let prev = *trace.samples.last().unwrap_or(&start);
                match reduced_hamiltonian(&st) {
                    Ok(h) => trace.max_h_drift = trace.max_h_drift.max((h - h0).abs() / h_scale),
                    Err(e) => {
                        failure = Some(e);
                        return StepControl::Stop;
                    }
                }
                trace.max_quadric = trace.max_quadric.max(quadric_residual(&st).abs() / (self.scale * self.scale));
                trace.samples.push(p);

                let (dist, pair) = min_pair_distance(&st);
                if dist < floor {
                    trace.end = TraceEnd::Singularity(pair);
                    return StepControl::Stop;
                }
                if norm(p) > self.escape_radius {
                    trace.end = TraceEnd::Escaped;
                    return StepControl::Stop;
                }
                match &goal {
                    Goal::Saddles { points, start: own, delta } => {
                        if !departed && norm(sub(p, points[*own])) > 2.0 * delta {
                            departed = true;
                        }
                        for (k, q) in points.iter().enumerate() {
                            if (k != *own || departed) && segment_distance(*q, prev, p) < *delta {
                                trace.end = TraceEnd::Saddle(k);
                                return StepControl::Stop;
                            }
                        }
                    }
                    Goal::Closure => {
                        let r = norm(sub(p, start));
                        farthest = farthest.max(r);
                        let next = dot(sub(p, start), heading);
                        if phase < 0.0 && next >= 0.0 && r < 0.25 * farthest {
                            trace.samples.push(start);
                            trace.end = TraceEnd::Closed;
                            return StepControl::Stop;
                        }
                        phase = next;
                    }
                }
                control
            },
        );
        match (failure, outcome) {
            (Some(VortexError::Singularity(pair)), _) | (None, Err(VortexError::Singularity(pair))) => {
                trace.end = TraceEnd::Singularity(pair);
                Ok(trace)
            }
            (Some(e), _) | (None, Err(e)) => Err(e),
            (None, Ok(_)) => Ok(trace),
        }
    }
}
