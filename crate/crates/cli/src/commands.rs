use std::fs;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use serde_json::json;
use vortex3_core::equilibria::{
    bifurcation_scan, cartesian_to_trilinear, collinear_equilibria, region_classify, tri_stability, write_scan_csv,
    Equilibrium,
};
use vortex3_core::integrate::{fmt17, integrate_full_with, write_full_csv, FullOptions};
use vortex3_core::portrait::{
    collapse_analysis, cone_state, portrait_index, render_svg, sample_portrait, write_curve_csv, OutputFormat,
    PortraitSpec, Projection,
};
use vortex3_core::reduction::{integrate_reduced_with, reduce as reduce_cfg, write_reduced_csv, ReducedOptions};
use vortex3_core::zero_circ::{
    bracket_constant, integrate_zero_with, to_zero_reduced, write_zero_csv, zero_equilibria, zero_singularities,
    ZeroCircGauge, ZeroCircKind, ZeroCircReducedState, ZeroOptions,
};
use vortex3_core::{Circulations, Termination, VortexConfiguration, VortexError};

use crate::config::{parse_list, parse_positions, parse_range, parse_real, Config};
use crate::emit;
use crate::{
    Axis, CollapseArgs, Common, EquilibriaArgs, Format, NumericalFailure, PortraitArgs, PortraitFormat,
    ProjectionArg, ReduceArgs, ScanArgs, SimulateArgs, ZerocircArgs,
};

const DEFAULT_TOL: f64 = 1e-10;

struct Inputs {
    config: Config,
    gamma: Option<Vec<f64>>,
    exact: Option<Circulations>,
    tol: f64,
    output: Option<PathBuf>,
}

impl Inputs {
    fn new(common: &Common) -> Result<Inputs> {
        let config = Config::load(common.config.as_deref())?;
        let (gamma, exact) = match &common.gamma {
            Some(text) => {
                let g = parse_list(text)?;
                let exact = (g.len() == 3).then(|| Circulations::parse(text)).transpose()?;
                (Some(g), exact)
            }
            None => match &config.circulations {
                Some(v) => {
                    let g: Vec<f64> = v.iter().map(|r| r.0).collect();
                    let exact = (g.len() == 3).then(|| Circulations::new(g[0], g[1], g[2])).transpose()?;
                    (Some(g), exact)
                }
                None => (None, None),
            },
        };
        let tol = common.tol.or(config.tol).unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0) {
            bail!("tolerance must be positive");
        }
        Ok(Inputs { gamma, exact, tol, output: common.output.clone(), config })
    }

    fn circulations(&self) -> Result<Circulations> {
        match (&self.exact, &self.gamma) {
            (Some(c), _) => Ok(c.clone()),
            (None, Some(g)) => bail!("expected three circulations, got {}", g.len()),
            (None, None) => bail!("circulations are required (--gamma or \"circulations\" in the config)"),
        }
    }

    fn theta(&self, flag: Option<&str>) -> Result<f64> {
        match flag {
            Some(t) => parse_real(t),
            None => self.config.theta.map(|r| r.0).context("Θ is required (--theta or \"theta\" in the config)"),
        }
    }

    fn positions(&self, flag: Option<&str>) -> Result<Vec<num_complex::Complex64>> {
        match flag {
            Some(p) => parse_positions(p),
            None => match &self.config.positions {
                Some(v) => Ok(v.iter().map(|p| num_complex::Complex64::new(p[0], p[1])).collect()),
                None => bail!("positions are required (--positions or \"positions\" in the config)"),
            },
        }
    }

    fn configuration(&self, flag: Option<&str>) -> Result<VortexConfiguration> {
        let g = self.gamma.clone().context("circulations are required")?;
        let cfg = VortexConfiguration::new(self.positions(flag)?, g)?;
        cfg.check_distinct().map_err(|e| anyhow!("invalid initial configuration: {e}"))?;
        Ok(cfg)
    }
}

fn sample_times(t_end: f64, samples: Option<usize>) -> Option<Vec<f64>> {
    samples.map(|n| (1..=n.max(1)).map(|k| t_end * k as f64 / n.max(1) as f64).collect())
}

fn check_termination(t: &Termination) -> Result<()> {
    match t {
        Termination::Completed => Ok(()),
        Termination::NearCollision { t, pair, distance } => Err(NumericalFailure(format!(
            "stopped at t = {t}: vortices {} and {} within {distance:e}",
            pair.0, pair.1
        ))
        .into()),
        Termination::NearSingularity { t, pair, distance } => {
            Err(NumericalFailure(format!("stopped at t = {t}: within {distance:e} of the {pair} singularity")).into())
        }
        Termination::StepLimit { t } => Err(NumericalFailure(format!("step limit reached at t = {t}")).into()),
        Termination::Escaped { t, radius } => {
            Err(NumericalFailure(format!("escaped to radius {radius:e} at t = {t}")).into())
        }
    }
}

pub fn simulate(a: SimulateArgs) -> Result<()> {
    let inp = Inputs::new(&a.common)?;
    let cfg = inp.configuration(a.positions.as_deref())?;
    let t_end = a.t_end.or(inp.config.t_end).unwrap_or(10.0);
    let mut opts = FullOptions::new(inp.tol);
    opts.collision_floor = a.collision_floor;
    opts.output_times = sample_times(t_end, a.samples.or(inp.config.samples));
    let traj = integrate_full_with(&cfg, (0.0, t_end), &opts)?;
    match a.format {
        Format::Csv => emit::with(inp.output.as_deref(), |w| write_full_csv(&traj, w))?,
        Format::Json => {
            let max_drift = traj.diagnostics.iter().map(|d| d.max_drift()).fold(0.0, f64::max);
            emit::json(
                inp.output.as_deref(),
                &json!({
                    "termination": traj.termination,
                    "max_relative_drift": max_drift,
                    "times": traj.times,
                    "states": traj.states,
                    "diagnostics": traj.diagnostics,
                }),
            )?
        }
    }
    check_termination(&traj.termination)
}

pub fn reduce(a: ReduceArgs) -> Result<()> {
    let inp = Inputs::new(&a.common)?;
    let cfg = inp.configuration(a.positions.as_deref())?;
    if cfg.len() != 3 {
        bail!("the reduction needs exactly three vortices, got {}", cfg.len());
    }
    let red = reduce_cfg(&cfg)?;
    let Some(t_end) = a.t_end.or(inp.config.t_end) else {
        return match a.format {
            Format::Json => emit::json(inp.output.as_deref(), &red.state),
            Format::Csv => emit::with(inp.output.as_deref(), |w| {
                writeln!(w, "X,Y,Z,Theta")?;
                let s = &red.state;
                writeln!(w, "{},{},{},{}", fmt17(s.x), fmt17(s.y), fmt17(s.z), fmt17(s.theta))
            }),
        };
    };
    let mut opts = ReducedOptions::new(inp.tol);
    opts.output_times = sample_times(t_end, a.samples.or(inp.config.samples));
    let traj = integrate_reduced_with(&red.state, (0.0, t_end), &opts)?;
    match a.format {
        Format::Csv => emit::with(inp.output.as_deref(), |w| write_reduced_csv(&traj, w))?,
        Format::Json => emit::json(
            inp.output.as_deref(),
            &json!({
                "initial": red.state,
                "termination": traj.termination,
                "times": traj.times,
                "states": traj.states.iter().map(|s| s.xyz()).collect::<Vec<_>>(),
                "diagnostics": traj.diagnostics,
            }),
        )?,
    }
    check_termination(&traj.termination)
}


fn list_equilibria(c: &Circulations, theta: f64) -> Result<Vec<Equilibrium>> {
    if theta == 0.0 {
        bail!(VortexError::Precondition("Θ = 0 has no isolated relative equilibria; use `collapse` or `portrait`".into()));
    }
    let mut out = collinear_equilibria(c, theta)?;
    match tri_stability(c, theta) {
        Ok(tris) => out.extend(tris.into_iter().filter(|e| e.admissible)),
        Err(VortexError::AtInfinity(_)) => {}
        Err(e) => return Err(e.into()),
    }
    Ok(out)
}

pub fn equilibria(a: EquilibriaArgs) -> Result<()> {
    let inp = Inputs::new(&a.common)?;
    let c = inp.circulations()?;
    let theta = inp.theta(a.theta.as_deref())?;
    let list = list_equilibria(&c, theta)?;
    match a.format {
        Format::Json => emit::json(inp.output.as_deref(), &json!({ "circulations": c, "Theta": theta, "equilibria": list })),
        Format::Csv => emit::with(inp.output.as_deref(), |w| {
            writeln!(w, "kind,X,Y,Z,stability,r,lambda1_re,lambda1_im,lambda2_re,lambda2_im,lambda3_re,lambda3_im")?;
            for e in &list {
                let mut row = vec![format!("{:?}", e.kind)];
                row.extend(e.state.xyz().map(fmt17));
                row.push(e.classification.to_string());
                row.push(fmt17(e.r));
                for l in &e.eigenvalues {
                    row.push(fmt17(l.re));
                    row.push(fmt17(l.im));
                }
                writeln!(w, "{}", row.join(","))?;
            }
            Ok(())
        }),
    }
}

#[derive(Serialize)]
struct RegionRow {
    x: f64,
    y: f64,
    #[serde(flatten)]
    report: vortex3_core::equilibria::RegionReport,
}

pub fn scan(a: ScanArgs) -> Result<()> {
    let thetas = parse_list(&a.theta)?;
    let grid = parse_range(&a.range)?;
    match a.axis {
        Axis::Symmetric => {
            let rows = bifurcation_scan(&thetas, &grid);
            match a.format {
                Format::Csv => emit::with(a.output.as_deref(), |w| write_scan_csv(&rows, w)),
                Format::Json => emit::json(a.output.as_deref(), &rows),
            }
        }
        Axis::Region => {
            let theta = thetas[0];
            let mut rows = Vec::new();
            for &y in &grid {
                for &x in &grid {
                    let p = cartesian_to_trilinear(x, y);
                    match region_classify(&p, theta) {
                        Ok(report) => rows.push(RegionRow { x, y, report }),
                        Err(VortexError::Precondition(_) | VortexError::ZeroTotalCirculation | VortexError::InvalidInput(_)) => {}
                        Err(e) => return Err(e.into()),
                    }
                }
            }
            match a.format {
                Format::Json => emit::json(a.output.as_deref(), &rows),
                Format::Csv => emit::with(a.output.as_deref(), |w| {
                    writeln!(w, "x,y,eta1,eta2,eta3,surface,deltoid_value,inside_deltoid,collinear_count,tri_stability,boundaries")?;
                    for r in &rows {
                        let e = r.report.eta;
                        let b: Vec<String> = r.report.boundaries.iter().map(|b| format!("{b:?}")).collect();
                        writeln!(
                            w,
                            "{},{},{},{},{},{:?},{},{},{},{},{}",
                            fmt17(r.x),
                            fmt17(r.y),
                            fmt17(e.eta1),
                            fmt17(e.eta2),
                            fmt17(e.eta3),
                            r.report.surface,
                            fmt17(r.report.deltoid_value),
                            r.report.inside_deltoid,
                            r.report.collinear_count,
                            r.report.tri_stability,
                            b.join(";")
                        )?;
                    }
                    Ok(())
                }),
            }
        }
    }
}

pub fn portrait(a: PortraitArgs) -> Result<()> {
    let inp = Inputs::new(&a.common)?;
    let c = inp.circulations()?;
    let theta = inp.theta(a.theta.as_deref())?;
    let pc = inp.config.portrait.clone().unwrap_or_default();
    let mut spec = PortraitSpec::new(c, theta);
    spec.projection = match a.projection {
        Some(ProjectionArg::Sphere) => Some(Projection::SphereFrontBack),
        Some(ProjectionArg::Plane) => Some(Projection::PlaneXY),
        None => pc.projection,
    };
    spec.orbit_count = a.orbits.or(pc.orbit_count).unwrap_or(spec.orbit_count);
    spec.separatrices = !a.no_separatrices && pc.separatrices.unwrap_or(true);
    spec.zoom = a.zoom.or(pc.zoom);
    spec.separatrix.tol = a.common.tol.or(inp.config.tol).unwrap_or(spec.separatrix.tol);
    if let Some(e) = a.epsilon.or(pc.epsilon) {
        spec.separatrix.epsilon = e;
    }
    if let Some(e) = a.escape.or(pc.escape) {
        spec.separatrix.escape = e;
    }
    if let Some(v) = pc.arrival {
        spec.separatrix.arrival = v;
    }
    if let Some(v) = pc.time_limit {
        spec.separatrix.time_limit = v;
    }
    let formats: Vec<OutputFormat> = if a.format.is_empty() {
        pc.outputs.clone().unwrap_or_else(|| match a.output_dir {
            Some(_) => vec![OutputFormat::Svg, OutputFormat::Csv, OutputFormat::Json],
            None => vec![OutputFormat::Json],
        })
    } else {
        a.format
            .iter()
            .map(|f| match f {
                PortraitFormat::Json => OutputFormat::Json,
                PortraitFormat::Csv => OutputFormat::Csv,
                PortraitFormat::Svg => OutputFormat::Svg,
            })
            .collect()
    };
    spec.outputs = formats.clone();
    let p = sample_portrait(&spec)?;
    for w in &p.warnings {
        eprintln!("warning: {w}");
    }
    let name = |i: usize| format!("curve_{i:03}.csv");

    let Some(dir) = a.output_dir else {
        return match formats[..] {
            [OutputFormat::Json] => emit::json(inp.output.as_deref(), &portrait_index(&p, name)),
            [OutputFormat::Svg] => emit::with(inp.output.as_deref(), |w| w.write_all(render_svg(&p).as_bytes())),
            _ => bail!("without --output-dir exactly one of json or svg can be written"),
        };
    };
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    if formats.contains(&OutputFormat::Csv) {
        for (i, curve) in p.curves.iter().enumerate() {
            let path = dir.join(name(i));
            emit::with(Some(&path), |w| write_curve_csv(curve, w))?;
        }
    }
    if formats.contains(&OutputFormat::Json) {
        let index = portrait_index(&p, |i| if formats.contains(&OutputFormat::Csv) { name(i) } else { String::new() });
        emit::json(Some(&dir.join("index.json")), &index)?;
    }
    if formats.contains(&OutputFormat::Svg) {
        fs::write(dir.join("portrait.svg"), render_svg(&p))?;
    }
    Ok(())
}

pub fn collapse(a: CollapseArgs) -> Result<()> {
    let inp = Inputs::new(&a.common)?;
    let c = if inp.gamma.is_some() { inp.circulations()? } else { Circulations::parse("2/3,2/3,-1/3")? };
    let angle = parse_real(&a.angle)?;
    let radius = parse_real(&a.radius)?;
    if !(radius > 0.0) {
        bail!("radius must be positive");
    }
    let state = cone_state(&c, radius, angle)?;
    let report = collapse_analysis(&state, inp.tol)?;
    emit::json(inp.output.as_deref(), &json!({ "circulations": c, "initial": state, "report": report }))
}

pub fn zerocirc(a: ZerocircArgs) -> Result<()> {
    let inp = Inputs::new(&a.common)?;
    let g = inp.gamma.clone().context("circulations are required")?;
    let (g1, g2) = match g[..] {
        [g1, g2] => (g1, g2),
        [g1, g2, g3] => {
            let scale = g1.abs() + g2.abs() + g3.abs();
            if (g1 + g2 + g3).abs() > 1e-14 * scale {
                bail!(VortexError::Precondition(format!("total circulation is {}, not zero", g1 + g2 + g3)));
            }
            (g1, g2)
        }
        _ => bail!("expected two or three circulations"),
    };
    let (state, gauge) = if a.positions.is_some() || inp.config.positions.is_some() {
        let pos = inp.positions(a.positions.as_deref())?;
        let cfg = VortexConfiguration::new(pos, vec![g1, g2, -g1 - g2])?;
        cfg.check_distinct().map_err(|e| anyhow!("invalid initial configuration: {e}"))?;
        let r = to_zero_reduced(&cfg)?;
        (Some(r.state), r.gauge)
    } else if let Some(s) = &a.start {
        let v = parse_list(s)?;
        let [x, y] = v[..] else { bail!("--start needs X,Y") };
        (Some(ZeroCircReducedState::new(x, y, g1, g2)), ZeroCircGauge::identity())
    } else {
        (None, ZeroCircGauge::identity())
    };
    let kind = state.as_ref().map_or(ZeroCircKind::Generic, |s| s.kind);

    let t_end = a.t_end.or(inp.config.t_end);
    if let (Some(s), Some(t_end)) = (&state, t_end) {
        let mut opts = ZeroOptions::new(inp.tol);
        opts.output_times = sample_times(t_end, a.samples.or(inp.config.samples));
        let traj = integrate_zero_with(s, (0.0, t_end), &opts)?;
        match a.format {
            Format::Csv => emit::with(inp.output.as_deref(), |w| write_zero_csv(&traj, w))?,
            Format::Json => emit::json(
                inp.output.as_deref(),
                &json!({
                    "initial": s,
                    "gauge": gauge,
                    "termination": traj.termination,
                    "times": traj.times,
                    "states": traj.states.iter().map(|s| [s.x, s.y]).collect::<Vec<_>>(),
                    "diagnostics": traj.diagnostics,
                }),
            )?,
        }
        return check_termination(&traj.termination);
    }

    let singular: Vec<_> = zero_singularities(g1, g2).iter().map(|(p, x)| json!({ "pair": p, "X": x })).collect();
    let equilibria = match kind {
        ZeroCircKind::Generic => Some(zero_equilibria(g1, g2)?),
        ZeroCircKind::Degenerate => None,
    };
    let summary = json!({
        "circulations": [g1, g2, -g1 - g2],
        "kind": kind,
        "bracket_constant": bracket_constant(g1, g2, kind)?,
        "singularities": singular,
        "equilibria": equilibria,
        "state": state,
        "gauge": gauge,
        "hamiltonian": state.as_ref().map(|s| s.hamiltonian()).transpose()?,
    });
    if a.format == Format::Csv {
        bail!("csv output needs a trajectory (--t-end with --start or --positions)");
    }
    emit::json(inp.output.as_deref(), &summary)
}
