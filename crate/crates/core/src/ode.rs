//! Dormand–Prince 5(4) integrator with step clamping onto requested output times.

use crate::error::{Result, VortexError};

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub initial_step: Option<f64>,
    pub max_step: f64,
}

impl IntegratorOptions {
    pub fn with_tol(tol: f64) -> Self {
        IntegratorOptions { rtol: tol, atol: tol, max_steps: 2_000_000, initial_step: None, max_step: f64::INFINITY }
    }
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self::with_tol(1e-10)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepControl {
    Continue,
    Stop,
    /// The observer changed the state in place.
    Modified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Finish {
    Completed,
    Stopped,
    StepLimit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub finish: Finish,
    pub t: f64,
    pub accepted: usize,
    pub rejected: usize,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn error_norm(err: &[f64], y: &[f64], y_new: &[f64], opts: &IntegratorOptions) -> f64 {
    let s: f64 = err
        .iter()
        .zip(y.iter().zip(y_new))
        .map(|(e, (a, b))| {
            let sk = opts.atol + opts.rtol * a.abs().max(b.abs());
            (e / sk).powi(2)
        })
        .sum();
    (s / err.len() as f64).sqrt()
}

/// Integrates `y' = f(t, y)` from `t0` towards `t1` (either direction).
///
/// `landing` lists times the integrator must hit exactly; the observer is
/// called after every accepted step with a flag that is true on those times.
/// With an empty `landing` every step is flagged. The observer may edit the
/// state if it returns [`StepControl::Modified`].
pub fn dopri5<F, O>(
    mut rhs: F,
    t0: f64,
    y0: &[f64],
    t1: f64,
    landing: &[f64],
    opts: &IntegratorOptions,
    mut observer: O,
) -> Result<Outcome>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    O: FnMut(f64, &mut [f64], bool) -> StepControl,
{
    let n = y0.len();
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    let mut err = vec![0.0; n];
    rhs(t, &y, &mut k[0])?;

    let mut h = match opts.initial_step {
        Some(h) => h.abs(),
        None => initial_step(&mut rhs, t, &y, &k[0], opts)?,
    }
    .min(opts.max_step)
    .min((t1 - t0).abs().max(f64::MIN_POSITIVE));

    let mut next_landing = landing.iter().position(|&s| (s - t0) * dir > 0.0);
    let mut accepted = 0;
    let mut rejected = 0;

    loop {
        if (t1 - t) * dir <= 0.0 {
            return Ok(Outcome { finish: Finish::Completed, t, accepted, rejected });
        }
        if accepted + rejected >= opts.max_steps {
            return Ok(Outcome { finish: Finish::StepLimit, t, accepted, rejected });
        }
        let mut target = t1;
        let mut hits_landing = false;
        if let Some(i) = next_landing {
            if (landing[i] - t1) * dir <= 0.0 {
                target = landing[i];
                hits_landing = true;
            }
        }
        let remaining = (target - t).abs();
        let clamped = h >= remaining;
        let h_step = if clamped { remaining } else { h };
        if h_step <= 1e-15 * t.abs().max(1.0) {
            return Err(VortexError::IntegrationFailure(format!("step size underflow at t = {t}")));
        }
        let hs = h_step * dir;

        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                tmp[i] = y[i] + hs * acc;
            }
            rhs(t + C[s] * hs, &tmp, &mut k[s])?;
        }
        for i in 0..n {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[i];
            }
            err[i] = hs * e;
        }
        let en = error_norm(&err, &y, &tmp, opts);
        if !en.is_finite() {
            h = h_step * 0.2;
            rejected += 1;
            continue;
        }
        if en <= 1.0 {
            t = if clamped { target } else { t + hs };
            y.copy_from_slice(&tmp);
            accepted += 1;
            // First-same-as-last: the seventh stage is f at the new point.
            let last = k[6].clone();
            k[0] = last;
            let at_output = landing.is_empty() || (clamped && hits_landing);
            if clamped && hits_landing {
                next_landing = next_landing.and_then(|i| (i + 1 < landing.len()).then_some(i + 1));
            }
            match observer(t, &mut y, at_output) {
                StepControl::Stop => return Ok(Outcome { finish: Finish::Stopped, t, accepted, rejected }),
                StepControl::Modified => rhs(t, &y, &mut k[0])?,
                StepControl::Continue => {}
            }
            let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
            let proposal = (h_step * fac).min(opts.max_step);
            h = if clamped { h.max(proposal) } else { proposal };
        } else {
            h = h_step * (0.9 * en.powf(-0.2)).clamp(0.1, 1.0);
            rejected += 1;
        }
    }
}

fn initial_step<F>(rhs: &mut F, t: f64, y: &[f64], f0: &[f64], opts: &IntegratorOptions) -> Result<f64>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let scaled = |v: &[f64]| -> f64 {
        let s: f64 = v
            .iter()
            .zip(y)
            .map(|(a, b)| (a / (opts.atol + opts.rtol * b.abs())).powi(2))
            .sum();
        (s / v.len() as f64).sqrt()
    };
    let d0 = scaled(y);
    let d1 = scaled(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1: Vec<f64> = y.iter().zip(f0).map(|(a, b)| a + h0 * b).collect();
    let mut f1 = vec![0.0; y.len()];
    rhs(t + h0, &y1, &mut f1)?;
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = scaled(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    Ok((100.0 * h0).min(h1))
}
