use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{tri_stability, Equilibrium, EquilibriumKind, Stability};
use crate::circulation::{Circulations, Pair};
use crate::error::{Result, VortexError};
use crate::integrate::fmt17;
use crate::reduction::{is_admissible, singularities, ReducedState};
use crate::symmetric_invariants;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScanBranch {
    E1,
    E2,
    E3,
    TriPlus,
    TriMinus,
    S12,
    S13,
    S23,
}

impl ScanBranch {
    pub const ALL: [ScanBranch; 8] = [
        ScanBranch::E1,
        ScanBranch::E2,
        ScanBranch::E3,
        ScanBranch::TriPlus,
        ScanBranch::TriMinus,
        ScanBranch::S12,
        ScanBranch::S13,
        ScanBranch::S23,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScanBranch::E1 => "E1",
            ScanBranch::E2 => "E2",
            ScanBranch::E3 => "E3",
            ScanBranch::TriPlus => "Etri+",
            ScanBranch::TriMinus => "Etri-",
            ScanBranch::S12 => "S12",
            ScanBranch::S13 => "S13",
            ScanBranch::S23 => "S23",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricBranch {
    pub branch: ScanBranch,
    pub equilibrium: Equilibrium,
}

fn check_gamma3(gamma3: f64) -> Result<Circulations> {
    if gamma3 == 0.0 || gamma3 == 1.0 || gamma3 == -1.0 {
        return Err(VortexError::Precondition(format!("Γ₃ = {gamma3} is excluded on the symmetric line")));
    }
    Circulations::symmetric(gamma3)
}

/// `(Z, X)` of `E₁` from the closed form, with `E₂` its mirror image. `None`
/// outside `−5/3 < Γ₃ < 1` or where the points are at infinity.
fn closed_form_e1(gamma3: f64, theta: f64) -> Option<(f64, f64)> {
    let d = (1.0 + gamma3) * (1.0 + 3.0 * gamma3);
    let radicand = (5.0 + 3.0 * gamma3) / (1.0 - gamma3);
    if d == 0.0 || !(radicand > 0.0) {
        return None;
    }
    let z = theta * (-3.0 * gamma3 * gamma3 - 6.0 * gamma3 + 1.0) / d;
    let x = 2.0 * theta / d * radicand.sqrt();
    Some((z, x))
}

/// Collinear equilibria of `Γ = ((1−Γ₃)/2, (1−Γ₃)/2, Γ₃)` that lie on the
/// physical part of the surface at this `Θ`.
pub fn symmetric_case_equilibria(gamma3: f64, theta: f64) -> Result<Vec<SymmetricBranch>> {
    let c = check_gamma3(gamma3)?;
    let g = symmetric_invariants(&c);
    let mut out = Vec::new();
    let e3 = ReducedState::new(0.0, 0.0, theta, theta, c.clone());
    if theta != 0.0 && is_admissible(&e3, 1e-12) {
        out.push(SymmetricBranch { branch: ScanBranch::E3, equilibrium: Equilibrium::at(e3, EquilibriumKind::Collinear)? });
    }
    if let Some((z, x_closed)) = closed_form_e1(gamma3, theta) {
        let x2 = g.gamma1 * (theta * theta - z * z) / (4.0 * g.gamma3);
        let x = x2.max(0.0).sqrt().copysign(x_closed);
        for (branch, xv) in [(ScanBranch::E1, x), (ScanBranch::E2, -x)] {
            let s = ReducedState::new(xv, 0.0, z, theta, c.clone());
            if is_admissible(&s, 1e-12) {
                out.push(SymmetricBranch { branch, equilibrium: Equilibrium::at(s, EquilibriumKind::Collinear)? });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub gamma3: f64,
    pub theta: f64,
    pub branch: ScanBranch,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// `None` for singularities and for absent branches.
    pub stability: Option<Stability>,
    pub exists: bool,
}

fn scan_point(gamma3: f64, theta: f64) -> Vec<ScanRow> {
    let absent = |branch| ScanRow { gamma3, theta, branch, x: f64::NAN, y: f64::NAN, z: f64::NAN, stability: None, exists: false };
    let mut rows: Vec<ScanRow> = ScanBranch::ALL.iter().map(|&b| absent(b)).collect();
    let Ok(c) = check_gamma3(gamma3) else { return rows };
    let mut put = |branch: ScanBranch, p: [f64; 3], stability: Option<Stability>| {
        let i = ScanBranch::ALL.iter().position(|b| *b == branch).unwrap_or(0);
        rows[i] = ScanRow { gamma3, theta, branch, x: p[0], y: p[1], z: p[2], stability, exists: true };
    };
    if let Ok(list) = symmetric_case_equilibria(gamma3, theta) {
        for b in list {
            put(b.branch, b.equilibrium.state.xyz(), Some(b.equilibrium.classification));
        }
    }
    if theta != 0.0 {
        if let Ok(tris) = tri_stability(&c, theta) {
            for (branch, e) in [ScanBranch::TriPlus, ScanBranch::TriMinus].into_iter().zip(tris) {
                if e.admissible {
                    put(branch, e.state.xyz(), Some(e.classification));
                }
            }
        }
    }
    for sp in singularities(&c, theta) {
        let Some(loc) = sp.location else { continue };
        let s = ReducedState::new(loc[0], loc[1], loc[2], theta, c.clone());
        if is_admissible(&s, 1e-9) {
            let branch = match sp.pair {
                Pair::P12 => ScanBranch::S12,
                Pair::P13 => ScanBranch::S13,
                Pair::P23 => ScanBranch::S23,
            };
            put(branch, loc, None);
        }
    }
    rows
}

/// Equilibria and singularities along the symmetric line for every `Γ₃` in
/// `grid` and every `Θ` in `thetas`, eight rows per sample.
pub fn bifurcation_scan(thetas: &[f64], grid: &[f64]) -> Vec<ScanRow> {
    let pts: Vec<(f64, f64)> = grid.iter().flat_map(|&g| thetas.iter().map(move |&t| (g, t))).collect();
    pts.par_iter().flat_map_iter(|&(g, t)| scan_point(g, t)).collect()
}

/// CSV with header `Gamma3,Theta,branch,X,Y,Z,stability,exists`.
pub fn write_scan_csv<W: Write>(rows: &[ScanRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "Gamma3,Theta,branch,X,Y,Z,stability,exists")?;
    for r in rows {
        let stability = match (r.exists, r.stability) {
            (false, _) => String::new(),
            (true, None) => "Singular".to_string(),
            (true, Some(s)) => s.to_string(),
        };
        let coord = |v: f64| if r.exists { fmt17(v) } else { String::new() };
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            fmt17(r.gamma3),
            fmt17(r.theta),
            r.branch.name(),
            coord(r.x),
            coord(r.y),
            coord(r.z),
            stability,
            r.exists
        )?;
    }
    Ok(())
}
