//! Global phase portraits of the reduced flow on one sheet of the phase surface.

mod collapse;
mod output;
mod separatrix;
mod svg;
mod trace;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use collapse::{collapse_analysis, collapse_h, collapse_radial_rate, cone_state, CollapseReport};
pub use output::{portrait_index, write_curve_csv, CurveFile};
pub use separatrix::{
    saddle_directions, separatrices, BranchEnd, OrbitCurve, OrbitKind, SeparatrixBranch, SeparatrixOptions,
};
pub use svg::render_svg;

use crate::circulation::{Circulations, Pair};
use crate::equilibria::{
    collinear_equilibria, region_classify, tri_stability, Equilibrium, Stability, TrilinearPoint,
};
use crate::error::{Result, VortexError};
use crate::reduction::{
    classify_surface, is_admissible, project_to_quadric, reduced_hamiltonian, reduced_vector_field, singularities,
    surface_scale, PhaseSurface, ReducedState, SingularPoint, SurfaceKind,
};
use crate::symmetric_invariants;
use trace::{norm, Goal, Trace, TraceEnd, Tracer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Projection {
    /// Unit-sphere views of the `Z ≥ 0` and `Z < 0` halves of a spheroid.
    SphereFrontBack,
    /// Orthographic projection onto `Z = 0`.
    PlaneXY,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortraitSpec {
    pub circulations: Circulations,
    pub theta: f64,
    /// Defaults to the natural projection for the surface.
    pub projection: Option<Projection>,
    pub orbit_count: usize,
    pub separatrices: bool,
    pub outputs: Vec<OutputFormat>,
    pub separatrix: SeparatrixOptions,
    /// Half-width of the plotted window of a planar projection; framed
    /// automatically when absent.
    pub zoom: Option<f64>,
}

impl PortraitSpec {
    pub fn new(circulations: Circulations, theta: f64) -> Self {
        PortraitSpec {
            circulations,
            theta,
            projection: None,
            orbit_count: 24,
            separatrices: true,
            outputs: vec![OutputFormat::Svg],
            separatrix: SeparatrixOptions::default(),
            zoom: None,
        }
    }
}

/// A singular ray `t ↦ t·direction`, `t > 0`, of a cone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularRay {
    pub pair: Pair,
    pub direction: [f64; 3],
}

/// One orbit of a separatrix: the unstable branch leaving `from`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Connection {
    /// Index into the portrait's equilibria.
    pub from: usize,
    pub to: Option<usize>,
    pub kind: OrbitKind,
    pub h_from: f64,
    pub h_to: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Portrait {
    pub circulations: Circulations,
    pub theta: f64,
    pub surface: PhaseSurface,
    pub projection: Projection,
    pub scale: f64,
    pub equilibria: Vec<Equilibrium>,
    pub singularities: Vec<SingularPoint>,
    pub singular_rays: Vec<SingularRay>,
    pub curves: Vec<OrbitCurve>,
    pub connections: Vec<Connection>,
    pub warnings: Vec<String>,
    pub zoom: Option<f64>,
}

impl Portrait {
    pub fn count_connections(&self, kind: OrbitKind) -> usize {
        self.connections.iter().filter(|c| c.kind == kind).count()
    }

    pub fn count_equilibria(&self, stability: Stability) -> usize {
        self.equilibria.iter().filter(|e| e.classification == stability).count()
    }

    /// Largest `|h_from − h_to|` over saddle connections, relative to the energy scale.
    pub fn max_connection_gap(&self) -> f64 {
        let [g1, g2, g3] = self.circulations.as_array();
        let scale = (g1 * g2).abs() + (g1 * g3).abs() + (g2 * g3).abs();
        self.connections
            .iter()
            .filter_map(|c| c.h_to.map(|h| (h - c.h_from).abs() / scale.max(c.h_from.abs())))
            .fold(0.0, f64::max)
    }
}

fn equilibria_on_sheet(c: &Circulations, theta: f64) -> Result<Vec<Equilibrium>> {
    let mut out = collinear_equilibria(c, theta)?;
    match tri_stability(c, theta) {
        Ok(tris) => out.extend(tris.into_iter().filter(|e| e.admissible)),
        Err(VortexError::AtInfinity(_)) => {}
        Err(e) => return Err(e),
    }
    Ok(out)
}

/// Rays where a pair distance vanishes on the physical nappe of a cone.
pub fn cone_singular_rays(c: &Circulations, z_sign: f64) -> Vec<SingularRay> {
    let [g1, g2, g3] = c.as_array();
    let g = symmetric_invariants(c);
    let k = (-4.0 * g.gamma3 / g.gamma1).sqrt();
    let mut out = Vec::new();
    for (pair, a, b) in [
        (Pair::P13, 4.0 * g.gamma3, g2 * g3 - g.gamma1 * g1),
        (Pair::P23, -4.0 * g.gamma3, g1 * g3 - g.gamma1 * g2),
    ] {
        let cos = -b * z_sign * k / a;
        if cos.abs() > 1.0 + 1e-12 {
            continue;
        }
        let cos = cos.clamp(-1.0, 1.0);
        let sin = (1.0 - cos * cos).sqrt();
        out.push(SingularRay { pair, direction: [cos, sin, z_sign * k] });
        if sin > 1e-12 {
            out.push(SingularRay { pair, direction: [cos, -sin, z_sign * k] });
        }
    }
    out
}

/// Unit vector tangent to the surface at `p`, as close to the `Y` axis as possible.
fn transversal(c: &Circulations, p: [f64; 3]) -> [f64; 3] {
    let g = symmetric_invariants(c);
    let k = 4.0 * g.gamma3 / g.gamma1;
    let n = [k * p[0], k * p[1], p[2]];
    let nn = norm(n);
    let pick = |e: [f64; 3]| {
        let d = if nn > 0.0 { (e[0] * n[0] + e[1] * n[1] + e[2] * n[2]) / (nn * nn) } else { 0.0 };
        [e[0] - d * n[0], e[1] - d * n[1], e[2] - d * n[2]]
    };
    let mut t = pick([0.0, 1.0, 0.0]);
    if norm(t) < 0.1 {
        t = pick([1.0, 0.0, 0.0]);
    }
    let tn = norm(t);
    t.map(|v| v / tn)
}

struct Seed {
    point: [f64; 3],
}

fn seeds(spec: &PortraitSpec, base: &ReducedState, organizers: &[[f64; 3]], obstacles: &[[f64; 3]], scale: f64) -> Vec<Seed> {
    let c = &spec.circulations;
    let mut out = Vec::new();
    if spec.orbit_count == 0 {
        return out;
    }
    if spec.theta == 0.0 {
        // Cone: seeds on a circle around the vertex.
        let g = symmetric_invariants(c);
        let k = (-4.0 * g.gamma3 / g.gamma1).sqrt();
        let sign = base.z.signum();
        for i in 0..spec.orbit_count {
            let phi = std::f64::consts::TAU * (i as f64 + 0.37) / spec.orbit_count as f64;
            out.push(Seed { point: [phi.cos(), phi.sin(), sign * k] });
        }
        return out;
    }
    let per = (spec.orbit_count / organizers.len().max(1)).max(1);
    for o in organizers {
        let others = obstacles.iter().filter(|q| norm([q[0] - o[0], q[1] - o[1], q[2] - o[2]]) > 1e-9 * scale);
        let reach = others.map(|q| norm([q[0] - o[0], q[1] - o[1], q[2] - o[2]])).fold(2.0 * scale, f64::min);
        let r_max = 0.9 * reach;
        let r_min = 0.03 * r_max;
        let t = transversal(c, *o);
        for i in 0..per {
            let f = if per == 1 { 0.5 } else { i as f64 / (per - 1) as f64 };
            let r = r_min * (r_max / r_min).powf(f);
            let p = [o[0] + r * t[0], o[1] + r * t[1], o[2] + r * t[2]];
            let s = project_to_quadric(&base.with_xyz(p));
            if is_admissible(&s, 1e-9) {
                out.push(Seed { point: s.xyz() });
            }
        }
    }
    out
}

fn min_distance_to_curve(p: [f64; 3], curve: &[[f64; 3]]) -> f64 {
    curve.iter().map(|q| norm([q[0] - p[0], q[1] - p[1], q[2] - p[2]])).fold(f64::INFINITY, f64::min)
}

/// Equilibria, singularities, separatrices and a family of periodic orbits
/// on the sheet of the phase surface selected by `spec.theta`.
pub fn sample_portrait(spec: &PortraitSpec) -> Result<Portrait> {
    let c = &spec.circulations;
    let theta = spec.theta;
    let surface = classify_surface(c, theta)?;
    let projection = match (spec.projection, surface.kind) {
        (Some(Projection::SphereFrontBack), SurfaceKind::Spheroid) | (None, SurfaceKind::Spheroid) => {
            Projection::SphereFrontBack
        }
        (Some(Projection::SphereFrontBack), _) => {
            return Err(VortexError::InvalidInput("the sphere projection needs a spheroidal surface".into()))
        }
        _ => Projection::PlaneXY,
    };
    let scale = surface_scale(c, theta);
    let mut warnings = Vec::new();
    if let Ok(p) = TrilinearPoint::from_circulations(c) {
        if let Ok(report) = region_classify(&p, theta) {
            for b in report.boundaries {
                warnings.push(format!("parameters lie on the {b:?} boundary"));
            }
        }
    }

    let equilibria = if theta == 0.0 { Vec::new() } else { equilibria_on_sheet(c, theta)? };
    let z_sign = surface.z_sign.unwrap_or(1.0);
    let (singular, singular_rays) = if theta == 0.0 {
        (vec![SingularPoint { pair: Pair::P12, location: Some([0.0; 3]) }], cone_singular_rays(c, z_sign))
    } else {
        let list = singularities(c, theta)
            .into_iter()
            .filter(|sp| {
                sp.location.is_some_and(|loc| {
                    is_admissible(&ReducedState::new(loc[0], loc[1], loc[2], theta, c.clone()), 1e-9)
                })
            })
            .collect();
        (list, Vec::new())
    };

    let base = ReducedState::new(0.0, 0.0, if theta == 0.0 { z_sign } else { theta }, theta, c.clone());
    let saddles: Vec<usize> =
        (0..equilibria.len()).filter(|&i| equilibria[i].classification == Stability::Saddle).collect();

    let mut curves = Vec::new();
    let mut connections = Vec::new();
    if spec.separatrices {
        let results: Vec<Result<Vec<SeparatrixBranch>>> = saddles
            .par_iter()
            .map(|&i| {
                let others: Vec<Equilibrium> =
                    saddles.iter().filter(|&&j| j != i).map(|&j| equilibria[j].clone()).collect();
                separatrices(&equilibria[i], &others, &spec.separatrix)
            })
            .collect();
        for (&i, branches) in saddles.iter().zip(results) {
            let others: Vec<usize> = saddles.iter().copied().filter(|&j| j != i).collect();
            let h_from = reduced_hamiltonian(&equilibria[i].state)?;
            for b in branches? {
                if b.end == BranchEnd::Unresolved {
                    warnings.push(format!("a separatrix branch of equilibrium {i} did not resolve"));
                }
                if b.unstable {
                    let to = match b.end {
                        BranchEnd::Returned => Some(i),
                        BranchEnd::Saddle(k) => Some(others[k]),
                        _ => None,
                    };
                    let h_to = to.map(|j| reduced_hamiltonian(&equilibria[j].state)).transpose()?;
                    connections.push(Connection { from: i, to, kind: b.curve.kind, h_from, h_to });
                }
                curves.push(b.curve);
            }
        }
    }

    let mut organizers: Vec<[f64; 3]> = equilibria
        .iter()
        .filter(|e| e.classification == Stability::Center)
        .map(|e| e.state.xyz())
        .collect();
    organizers.extend(singular.iter().filter_map(|s| s.location));
    let mut obstacles: Vec<[f64; 3]> = equilibria.iter().map(|e| e.state.xyz()).collect();
    obstacles.extend(singular.iter().filter_map(|s| s.location));

    let tracer = Tracer {
        base: &base,
        tol: spec.separatrix.tol,
        scale,
        escape_radius: spec.separatrix.escape * scale,
        max_steps: spec.separatrix.max_steps,
    };
    let collapse_cone = theta == 0.0 && symmetric_invariants(c).gamma2.abs() < 1e-12;
    let traced: Vec<Option<OrbitCurve>> = seeds(spec, &base, &organizers, &obstacles, scale)
        .par_iter()
        .map(|seed| trace_seed(&tracer, seed.point, scale, collapse_cone))
        .collect::<Result<Vec<_>>>()?;
    for curve in traced.into_iter().flatten() {
        if curve.kind == OrbitKind::Periodic {
            let start = curve.samples[0];
            let dup = curves.iter().any(|o: &OrbitCurve| {
                o.kind == OrbitKind::Periodic
                    && (o.h_level - curve.h_level).abs() < 1e-9 * curve.h_level.abs().max(1.0)
                    && min_distance_to_curve(start, &o.samples) < 1e-3 * scale
            });
            if dup {
                continue;
            }
        }
        curves.push(curve);
    }
    curves.sort_by(|a, b| a.h_level.total_cmp(&b.h_level).then(a.kind.cmp(&b.kind)));

    Ok(Portrait {
        circulations: c.clone(),
        theta,
        surface,
        projection,
        scale,
        equilibria,
        singularities: singular,
        singular_rays,
        curves,
        connections,
        warnings,
        zoom: spec.zoom,
    })
}

fn trace_seed(tracer: &Tracer, p: [f64; 3], scale: f64, collapse_cone: bool) -> Result<Option<OrbitCurve>> {
    let s = tracer.base.with_xyz(p);
    let Ok(h) = reduced_hamiltonian(&s) else { return Ok(None) };
    let speed = norm(reduced_vector_field(&s)?);
    if !(speed > 0.0) {
        return Ok(None);
    }
    let t_max = 400.0 * scale / speed;
    let fwd = tracer.run(p, 1.0, t_max, Goal::Closure)?;
    if fwd.end == TraceEnd::Closed {
        return Ok(Some(OrbitCurve {
            kind: OrbitKind::Periodic,
            separatrix: false,
            samples: fwd.samples,
            h_level: h,
            max_h_drift: fwd.max_h_drift,
            max_quadric_residual: fwd.max_quadric,
        }));
    }
    let bwd = tracer.run(p, -1.0, t_max, Goal::Closure)?;
    let far = 100.0 * norm(p).max(scale);
    let open = |t: &Trace| match t.end {
        TraceEnd::Escaped | TraceEnd::Singularity(_) => true,
        TraceEnd::TimeLimit => t.samples.last().is_some_and(|q| norm(*q) > far),
        _ => false,
    };
    if !(open(&fwd) && open(&bwd)) {
        return Ok(None);
    }
    let mut samples: Vec<[f64; 3]> = bwd.samples.into_iter().skip(1).rev().collect();
    samples.extend(fwd.samples);
    Ok(Some(OrbitCurve {
        kind: if collapse_cone { OrbitKind::Ray } else { OrbitKind::Unbounded },
        separatrix: false,
        samples,
        h_level: h,
        max_h_drift: fwd.max_h_drift.max(bwd.max_h_drift),
        max_quadric_residual: fwd.max_quadric.max(bwd.max_quadric),
    }))
}
