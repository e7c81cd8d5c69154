use nalgebra::DMatrix;
use num_complex::Complex64;

use super::uni::UniPoly;

/// All complex roots with multiplicity. Degrees up to three use closed forms,
/// higher degrees the companion-matrix eigenvalues; every root is then
/// Newton-polished and snapped to the real axis when `|Im| < 1e-12·scale`.
pub fn roots(p: &UniPoly<f64>) -> Vec<Complex64> {
    let n = match p.degree() {
        Some(n) if n >= 1 => n,
        _ => return Vec::new(),
    };
    let c = p.coeffs();
    let raw = match n {
        1 => vec![Complex64::new(-c[0] / c[1], 0.0)],
        2 => quadratic(c[2], c[1], c[0]),
        3 => cubic(c[2] / c[3], c[1] / c[3], c[0] / c[3]),
        _ => companion(p),
    };
    let scale = root_scale(p);
    let mut out: Vec<Complex64> = raw
        .into_iter()
        .map(|z| {
            let z = polish_root(p, z);
            if z.im.abs() < 1e-12 * scale.max(z.norm()) {
                Complex64::new(z.re, 0.0)
            } else {
                z
            }
        })
        .collect();
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    out
}

/// Real parts of the roots whose imaginary part is below `imag_tol` relative to
/// the root magnitude.
pub fn real_roots(p: &UniPoly<f64>, imag_tol: f64) -> Vec<f64> {
    roots(p)
        .into_iter()
        .filter(|z| z.im.abs() <= imag_tol * z.norm().max(1.0))
        .map(|z| z.re)
        .collect()
}

/// Cauchy bound on root magnitude, used as a scale for tolerances.
fn root_scale(p: &UniPoly<f64>) -> f64 {
    let c = p.coeffs();
    let lead = c[c.len() - 1].abs();
    1.0 + c[..c.len() - 1].iter().map(|v| v.abs() / lead).fold(0.0, f64::max)
}

/// Newton iteration that only accepts steps reducing `|p(z)|`.
pub fn polish_root(p: &UniPoly<f64>, mut z: Complex64) -> Complex64 {
    let dp = p.derivative();
    let mut fz = p.eval_complex(z).norm();
    for _ in 0..12 {
        let d = dp.eval_complex(z);
        if d.norm() == 0.0 || fz == 0.0 {
            break;
        }
        let next = z - p.eval_complex(z) / d;
        let fnext = p.eval_complex(next).norm();
        if !(fnext < fz) {
            break;
        }
        z = next;
        fz = fnext;
    }
    z
}

fn quadratic(a: f64, b: f64, c: f64) -> Vec<Complex64> {
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        let q = -0.5 * (b + b.signum() * s);
        if q == 0.0 {
            return vec![Complex64::new(0.0, 0.0); 2];
        }
        vec![Complex64::new(q / a, 0.0), Complex64::new(c / q, 0.0)]
    } else {
        let re = -b / (2.0 * a);
        let im = (-disc).sqrt() / (2.0 * a.abs());
        vec![Complex64::new(re, -im), Complex64::new(re, im)]
    }
}

/// Roots of the monic cubic `x³ + a x² + b x + c`.
fn cubic(a: f64, b: f64, c: f64) -> Vec<Complex64> {
    let q = (a * a - 3.0 * b) / 9.0;
    let r = (2.0 * a * a * a - 9.0 * a * b + 27.0 * c) / 54.0;
    let shift = a / 3.0;
    let q3 = q * q * q;
    if r * r < q3 {
        let theta = (r / q3.sqrt()).clamp(-1.0, 1.0).acos();
        let m = -2.0 * q.sqrt();
        let tau = std::f64::consts::TAU;
        (0..3)
            .map(|k| Complex64::new(m * ((theta + tau * k as f64) / 3.0).cos() - shift, 0.0))
            .collect()
    } else {
        let big = -r.signum() * (r.abs() + (r * r - q3).sqrt()).cbrt();
        let small = if big == 0.0 { 0.0 } else { q / big };
        let re = -(big + small) / 2.0 - shift;
        let im = 3f64.sqrt() / 2.0 * (big - small);
        vec![
            Complex64::new(big + small - shift, 0.0),
            Complex64::new(re, im),
            Complex64::new(re, -im),
        ]
    }
}

fn companion(p: &UniPoly<f64>) -> Vec<Complex64> {
    let c = p.coeffs();
    let n = c.len() - 1;
    let lead = c[n];
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i] / lead;
    }
    m.complex_eigenvalues().iter().copied().collect()
}
