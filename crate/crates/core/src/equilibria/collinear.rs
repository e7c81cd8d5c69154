use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{field_residual, reduced_jacobian, relative_quadric_residual, Equilibrium, EquilibriumKind};
use crate::circulation::{rational_from_f64, rational_to_f64, symmetric_invariants_exact, Circulations};
use crate::error::{Result, VortexError};
use crate::poly::{
    discriminant, real_roots, resultant_formal, resultant_in_formal, BiPoly, QBiPoly, QPoly, UniPoly, Variable,
};
use crate::reduction::{classify_surface, reduced_vector_field, suggest_labeling, surface_scale, LogForms, ReducedState};
use crate::symmetric_invariants;

/// Polynomials in `(X, Z)` describing collinear equilibria at fixed `Θ`.
#[derive(Debug, Clone)]
pub struct CollinearSystem {
    /// Numerator of `dY/dt` on `Y = 0`, degree 3 in `X`.
    pub num: QBiPoly,
    /// `γ₁Z² + 4γ₃X² − γ₁Θ²`
    pub quadric: QBiPoly,
    /// `Z + Θ` and the two linear factors vanishing at the `Z`-coordinates of `S₁₃`, `S₂₃`.
    pub singular_factors: [QPoly; 3],
    /// `−64 Γ₁²Γ₂²Γ₃² γ₁`
    pub normalization: BigRational,
    parts: Parts,
}

#[derive(Debug, Clone)]
struct Parts {
    forms: [QBiPoly; 3],
    w: [BigRational; 3],
    a: [BigRational; 3],
    b: [BigRational; 3],
    gam1: BigRational,
    gam3: BigRational,
    theta: BigRational,
    hz: QBiPoly,
    hx_red: QBiPoly,
}

fn r(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

fn check_preconditions(c: &Circulations) -> Result<()> {
    let g = symmetric_invariants(c);
    let scale: f64 = c.as_array().iter().map(|v| v.abs()).sum();
    if g.gamma1.abs() <= 1e-14 * scale {
        return Err(VortexError::ZeroTotalCirculation);
    }
    if g.gamma3 == 0.0 {
        return Err(VortexError::Precondition("a vanishing circulation is not a three-vortex problem".into()));
    }
    if c.g1() + c.g2() == 0.0 {
        return Err(VortexError::RelabelRequired(suggest_labeling(c)));
    }
    Ok(())
}

pub fn collinear_polynomials(c: &Circulations, theta: f64) -> Result<CollinearSystem> {
    check_preconditions(c)?;
    let th = rational_from_f64(theta)?;
    let [g1, g2, g3] = c.exact().clone();
    let [gam1, _, gam3] = symmetric_invariants_exact(c);
    let s = &g1 + &g2;
    let w = [&g1 * &g2, &g1 * &g3, &g2 * &g3];
    let a = [r(0), r(4) * &gam3, -(r(4) * &gam3)];
    let b = [r(1), &g2 * &g3 - &gam1 * &g1, &g1 * &g3 - &gam1 * &g2];
    let cc = [r(1), &s * (&g1 + &g3), &s * (&g2 + &g3)];
    let forms: [QBiPoly; 3] = [0, 1, 2].map(|k| BiPoly::linear(a[k].clone(), b[k].clone(), &cc[k] * &th));
    let (a12, a13, a23) = (&forms[0], &forms[1], &forms[2]);
    let others = [a13 * a23, a12 * a23, a12 * a13];

    // P·h_Z and P·h_X up to the factor −1/2, with P = A₁₂A₁₃A₂₃; h_X's
    // common factor A₁₂ is split off.
    let mut hz = QBiPoly::zero();
    for k in 0..3 {
        hz = hz + others[k].scale(&(&w[k] * &b[k]));
    }
    let hx_red = a23.scale(&(&w[1] * &a[1])) + a13.scale(&(&w[2] * &a[2]));
    let hx = a12 * &hx_red;

    // P·dY/dt = −2X·(P h_Z)' + (γ₁/2γ₃) Z·(P h_X)'
    let ratio = &gam1 / (r(2) * &gam3);
    let num = (&QBiPoly::x() * &hz).scale(&r(-2)) + (&QBiPoly::y() * &hx).scale(&ratio);

    let quadric = BiPoly::from_grid(vec![
        vec![-(&gam1 * &th * &th), r(0), gam1.clone()],
        vec![],
        vec![r(4) * &gam3],
    ]);
    let l12 = UniPoly::new(vec![th.clone(), r(1)]);
    let l13 = UniPoly::new(vec![(&gam1 * &g1 - &g2 * &g3) * &th, -(&s * (&g1 + &g3))]);
    let l23 = UniPoly::new(vec![(&gam1 * &g2 - &g1 * &g3) * &th, -(&s * (&g2 + &g3))]);
    let normalization = r(-64) * &g1 * &g1 * &g2 * &g2 * &g3 * &g3 * &gam1;
    Ok(CollinearSystem {
        num,
        quadric,
        singular_factors: [l12, l13, l23],
        normalization,
        parts: Parts { forms, w, a, b, gam1, gam3, theta: th, hz, hx_red },
    })
}

impl CollinearSystem {
    fn stripped(&self, p: &QPoly, powers: [u32; 3], formal: usize) -> Result<QPoly> {
        let mut out = p.clone();
        for (l, &k) in self.singular_factors.iter().zip(&powers) {
            if l.is_zero() {
                return Err(VortexError::DegeneratePolynomial("a singular factor vanishes identically".into()));
            }
            for _ in 0..k {
                out = out.exact_div(l)?;
            }
        }
        if out.degree().is_some_and(|d| d > formal) {
            return Err(VortexError::DegeneratePolynomial(format!("stripped resultant exceeds degree {formal}")));
        }
        Ok(out)
    }

    /// `res_X(quadric, num)` with formal degrees 2 and 3. The quadric has no
    /// linear term in `X`, so reducing `num` modulo it gives the resultant in
    /// closed form: `α(αn₀ − βn₂)² + β(αn₁ − βn₃)²` with `α = 4γ₃`, `β = γ₁(Z² − Θ²)`.
    pub fn quadric_resultant(&self) -> QPoly {
        let mut n = self.num.coeffs_in(Variable::X);
        n.resize(4, UniPoly::zero());
        let alpha = UniPoly::constant(r(4) * &self.parts.gam3);
        let th2 = &self.parts.theta * &self.parts.theta;
        let beta = UniPoly::new(vec![-(&self.parts.gam1 * th2), r(0), self.parts.gam1.clone()]);
        let u = &(&alpha * &n[0]) - &(&beta * &n[2]);
        let v = &(&alpha * &n[1]) - &(&beta * &n[3]);
        &(&alpha * &(&u * &u)) + &(&beta * &(&v * &v))
    }

    /// The quadric resultant with the singular factors removed: a cubic in `Z`
    /// (formally; leading terms may vanish).
    pub fn elimination_cubic(&self) -> Result<QPoly> {
        self.stripped(&self.quadric_resultant(), [1, 1, 1], 3)
    }

    /// Numerator of the stability scalar `r` on `Y = 0`, degree 6 in `X`.
    pub fn rnum(&self) -> QBiPoly {
        let Parts { forms, w, a, b, gam1, gam3, hz, hx_red, .. } = &self.parts;
        let (a12, a13, a23) = (&forms[0], &forms[1], &forms[2]);
        let p1 = a13 * a23;
        let sq = [p1.clone(), a12 * a23, a12 * a13].map(|p| &p * &p);
        let mut hzz = QBiPoly::zero();
        for k in 0..3 {
            hzz = hzz + sq[k].scale(&(&w[k] * &b[k] * &b[k]));
        }
        let a23s = a23 * a23;
        let a13s = a13 * a13;
        let hxx_red = a23s.scale(&(&w[1] * &a[1] * &a[1])) + a13s.scale(&(&w[2] * &a[2] * &a[2]));
        let hxz_red = a23s.scale(&(&w[1] * &a[1] * &b[1])) + a13s.scale(&(&w[2] * &a[2] * &b[2]));
        let x = QBiPoly::x();
        let z = QBiPoly::y();
        let g16 = r(16) * gam3;
        let g4 = r(4) * gam1;
        (&(hz * hz) * &p1).scale(&g16)
            + (&(&x * hx_red) * &hzz).scale(&g16)
            + a12 * &((&(&x * hz) * &hxz_red).scale(&(-&g16)) + (&(&z * hz) * &hxx_red).scale(&g4))
            + &(a12 * a12) * &((&(hx_red * hx_red) * &p1).scale(&g4) + (&(&z * hx_red) * &hxz_red).scale(&(-&g4)))
    }
}

/// The residual cubic `p₃(Z)`, normalized so its discriminant equals
/// `64Θ⁶(Γ₁−Γ₂)²(Γ₁+Γ₂)²γ₁²γ₂²γ₃⁶(32γ₂γ₁²−36γ₃γ₁−3γ₂²)`.
pub fn p3_polynomial(c: &Circulations, theta: f64) -> Result<QPoly> {
    let sys = collinear_polynomials(c, theta)?;
    let cubic = sys.elimination_cubic()?;
    Ok(cubic.scale(&(BigRational::from_integer(1.into()) / &sys.normalization)))
}

fn normalized_f64(p: &QPoly) -> UniPoly<f64> {
    let big = p.coeffs().iter().map(|c| c.abs()).max().unwrap_or_else(BigRational::zero);
    if big.is_zero() {
        return UniPoly::zero();
    }
    UniPoly::new(p.coeffs().iter().map(|c| rational_to_f64(&(c / &big))).collect())
}

/// Newton on `(dY/dt, quadric)` in `(X, Z)` at `Y = 0`.
fn polish(mut s: ReducedState) -> ReducedState {
    let g = symmetric_invariants(&s.circulations);
    let k = 4.0 * g.gamma3 / g.gamma1;
    let mut best = field_residual(&s).unwrap_or(f64::INFINITY) + relative_quadric_residual(&s);
    for _ in 0..30 {
        let (Ok(f), Ok(j)) = (reduced_vector_field(&s), reduced_jacobian(&s)) else { break };
        let q = s.theta * s.theta - s.z * s.z - k * s.x * s.x;
        let (a11, a12, a21, a22) = (j[(1, 0)], j[(1, 2)], -2.0 * k * s.x, -2.0 * s.z);
        let det = a11 * a22 - a12 * a21;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dx = (f[1] * a22 - a12 * q) / det;
        let dz = (a11 * q - a21 * f[1]) / det;
        let trial = s.with_xyz([s.x - dx, 0.0, s.z - dz]);
        let score = field_residual(&trial).unwrap_or(f64::INFINITY) + relative_quadric_residual(&trial);
        if !(score < best) {
            break;
        }
        best = score;
        s = trial;
    }
    s
}

fn near_singularity(s: &ReducedState) -> bool {
    let forms = LogForms::new(&s.circulations);
    let v = forms.values(s.x, s.z, s.theta);
    let l = s.x.abs().max(s.z.abs()).max(surface_scale(&s.circulations, s.theta));
    (0..3).any(|k| {
        let n = forms.a[k].abs() + forms.b[k].abs() + forms.c[k].abs();
        v[k].abs() <= 1e-9 * n * l
    })
}

/// Collinear equilibria on both sheets of the level set at this `Θ`,
/// admissible or not.
pub fn collinear_equilibria_all(c: &Circulations, theta: f64) -> Result<Vec<Equilibrium>> {
    let cubic = p3_polynomial(c, theta)?;
    if cubic.is_zero() {
        return Err(VortexError::DegeneratePolynomial("the residual cubic vanishes identically".into()));
    }
    let p = normalized_f64(&cubic);
    if p.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    let g = symmetric_invariants(c);
    let l = surface_scale(c, theta);
    let mut zs: Vec<f64> = real_roots(&p, 1e-6);
    zs.sort_by(f64::total_cmp);
    zs.dedup_by(|a, b| (*a - *b).abs() <= 1e-7 * l);

    let mut found: Vec<ReducedState> = Vec::new();
    for z in zs {
        let x2 = g.gamma1 * (theta * theta - z * z) / (4.0 * g.gamma3);
        if x2 < -1e-8 * l * l {
            continue;
        }
        let x = x2.max(0.0).sqrt();
        let candidates: Vec<ReducedState> = [x, -x]
            .into_iter()
            .map(|xv| ReducedState::new(xv, 0.0, z, theta, c.clone()))
            .filter(|s| !near_singularity(s))
            .collect();
        let scored: Vec<(f64, ReducedState)> =
            candidates.into_iter().map(|s| (field_residual(&s).unwrap_or(f64::INFINITY), s)).collect();
        let good: Vec<&(f64, ReducedState)> = scored.iter().filter(|(r, _)| *r < 1e-8).collect();
        let chosen: Vec<ReducedState> = if good.is_empty() {
            scored
                .iter()
                .filter(|(r, _)| r.is_finite())
                .min_by(|a, b| a.0.total_cmp(&b.0))
                .map(|(_, s)| s.clone())
                .into_iter()
                .collect()
        } else {
            good.into_iter().map(|(_, s)| s.clone()).collect()
        };
        for s in chosen {
            let s = polish(s);
            if near_singularity(&s) {
                continue;
            }
            let ok = field_residual(&s).is_ok_and(|r| r < 1e-10) && relative_quadric_residual(&s) < 1e-10;
            if ok && !found.iter().any(|f| f.distance_to(s.xyz()) <= 1e-7 * l) {
                found.push(s);
            }
        }
    }
    found.sort_by(|a, b| a.z.total_cmp(&b.z).reverse().then(a.x.total_cmp(&b.x)));
    found.into_iter().map(|s| Equilibrium::at(s, EquilibriumKind::Collinear)).collect()
}

/// Collinear equilibria on the physical part of the surface.
pub fn collinear_equilibria(c: &Circulations, theta: f64) -> Result<Vec<Equilibrium>> {
    classify_surface(c, theta)?;
    Ok(collinear_equilibria_all(c, theta)?.into_iter().filter(|e| e.admissible).collect())
}

/// Re-linearizes a collinear equilibrium after checking it is one.
pub fn collinear_stability(e: &Equilibrium) -> Result<Equilibrium> {
    let l = surface_scale(&e.state.circulations, e.state.theta);
    if e.state.y.abs() > 1e-12 * l {
        return Err(VortexError::Precondition("collinear equilibria have Y = 0".into()));
    }
    if !(field_residual(&e.state)? < 1e-10) {
        return Err(VortexError::Precondition("state is not stationary".into()));
    }
    Equilibrium::at(e.state.clone(), EquilibriumKind::Collinear)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscriminantReport {
    pub computed: f64,
    pub reference: f64,
    /// `computed / reference`; exactly one for the chosen normalization.
    pub ratio: f64,
    /// Discriminant of `p₃` divided by the fourth power of its largest coefficient.
    pub scaled: f64,
    pub deltoid_quartic: f64,
}

pub fn discriminant_p3(c: &Circulations, theta: f64) -> Result<DiscriminantReport> {
    let p = p3_polynomial(c, theta)?;
    let padded = UniPoly::new(p.padded(3)?);
    if padded.degree().unwrap_or(0) < 3 {
        return Err(VortexError::DegeneratePolynomial("p₃ has dropped degree".into()));
    }
    let disc = discriminant(&padded)?;
    let [g1, g2, _] = c.exact().clone();
    let [gam1, gam2, gam3] = symmetric_invariants_exact(c);
    let th = rational_from_f64(theta)?;
    let quartic = r(32) * &gam2 * &gam1 * &gam1 - r(36) * &gam3 * &gam1 - r(3) * &gam2 * &gam2;
    let d12 = &g1 - &g2;
    let s12 = &g1 + &g2;
    let th3 = &th * &th * &th;
    let g3cube = &gam3 * &gam3 * &gam3;
    let reference = r(64) * &th3 * &th3 * &d12 * &d12 * &s12 * &s12 * &gam1 * &gam1 * &gam2 * &gam2 * &g3cube * &g3cube
        * &quartic;
    let big = p.coeffs().iter().map(|v| v.abs()).max().unwrap_or_else(BigRational::zero);
    let b2 = &big * &big;
    Ok(DiscriminantReport {
        computed: rational_to_f64(&disc),
        reference: rational_to_f64(&reference),
        ratio: if reference.is_zero() { f64::NAN } else { rational_to_f64(&(&disc / &reference)) },
        scaled: if big.is_zero() { 0.0 } else { rational_to_f64(&(&disc / (&b2 * &b2))) },
        deltoid_quartic: rational_to_f64(&quartic),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityBoundary {
    /// `res_Z(A, B)` after removing the singular factors, as a double; may be
    /// infinite for extreme inputs, see `relative`.
    pub value: f64,
    pub is_zero: bool,
    /// The second elimination vanished identically: `dY/dt` and `r` share a
    /// factor for every `Z`, so the value is zero without marking a change of stability.
    pub degenerate: bool,
    /// `|value| / (‖A‖¹²‖B‖³)` with `‖·‖` the largest coefficient.
    pub relative: f64,
    pub sign: i8,
    pub gamma: [f64; 3],
    pub pair_sums: [f64; 3],
    pub deltoid_quartic: f64,
}

/// Triple-resultant elimination of `{quadric, dY/dt, r}` restricted to `Y = 0`.
pub fn stability_boundary_value(c: &Circulations, theta: f64) -> Result<StabilityBoundary> {
    let g = symmetric_invariants(c);
    if g.gamma2 == 0.0 && g.gamma1 == 0.0 {
        return Err(VortexError::Precondition("γ₁ and γ₂ vanish".into()));
    }
    let sys = collinear_polynomials(c, theta)?;
    let a = sys.elimination_cubic()?;
    let b_raw = resultant_in_formal(Variable::X, &sys.num, 3, &sys.rnum(), 6)?;
    let [g1, g2, g3] = c.as_array();
    let factors = |value: &BigRational, relative: f64, degenerate: bool| StabilityBoundary {
        value: rational_to_f64(value),
        is_zero: value.is_zero(),
        degenerate,
        relative,
        sign: if value.is_zero() { 0 } else if value.is_positive() { 1 } else { -1 },
        gamma: [g.gamma1, g.gamma2, g.gamma3],
        pair_sums: [g1 + g2, g1 + g3, g2 + g3],
        deltoid_quartic: 32.0 * g.gamma2 * g.gamma1 * g.gamma1 - 36.0 * g.gamma3 * g.gamma1 - 3.0 * g.gamma2 * g.gamma2,
    };
    if b_raw.is_zero() {
        return Ok(factors(&BigRational::zero(), 0.0, true));
    }
    let b = sys.stripped(&b_raw, [4, 1, 1], 12)?;
    let value = resultant_formal(&a, 3, &b, 12)?;
    let norm = |p: &QPoly| p.coeffs().iter().map(|v| v.abs()).max().unwrap_or_else(BigRational::zero);
    let (na, nb) = (norm(&a), norm(&b));
    let denom = na.pow(12) * nb.pow(3);
    let relative = if denom.is_zero() { f64::NAN } else { rational_to_f64(&(value.abs() / denom)) };
    Ok(factors(&value, relative, false))
}
