use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vortex3_core::circulation::parse_rational;
use vortex3_core::equilibria::{
    bifurcation_scan, cartesian_to_trilinear, collinear_equilibria, deltoid_quartic, discriminant_p3, p3_polynomial,
    tri_stability, ScanBranch, ScanRow, Stability,
};
use vortex3_core::integrate::{integrate_full_with, FullOptions};
use vortex3_core::poly::{discriminant, q, resultant, roots, QPoly};
use vortex3_core::portrait::{collapse_analysis, cone_state, sample_portrait, OrbitKind, Portrait, PortraitSpec};
use vortex3_core::reduction::{
    admissible_theta_sign, integrate_reduced_with, pair_distances_sq, project_to_quadric, reduce, reduced_hamiltonian,
    singularities, surface_kind, ReducedOptions, ReducedState, SurfaceKind,
};
use vortex3_core::zero_circ::{integrate_zero, zero_equilibria, zero_singularities, DipoleCanonicalState, ZeroCircReducedState};
use vortex3_core::{
    hamiltonian, integrate_full, symmetric_invariants, vortex_velocities, Circulations, Pair, VortexConfiguration,
};

/// Writes the verdict past the test harness's capture and fails on FAIL.
fn report(n: u32, title: &str, failures: &[String], detail: String) {
    let verdict = if failures.is_empty() { "PASS" } else { "FAIL" };
    let mut line = format!("criterion {n:>2} {verdict}: {title}; {detail}");
    for f in failures {
        line.push_str(&format!("\n    {f}"));
    }
    let _ = writeln!(std::io::stderr(), "{line}");
    assert!(failures.is_empty(), "{line}");
}

fn random_positions(rng: &mut ChaCha8Rng, half: f64, min_gap: f64) -> [Complex64; 3] {
    loop {
        let z = [0, 1, 2].map(|_| Complex64::new(rng.random_range(-half..half), rng.random_range(-half..half)));
        if (z[0] - z[1]).norm() > min_gap && (z[0] - z[2]).norm() > min_gap && (z[1] - z[2]).norm() > min_gap {
            return z;
        }
    }
}

fn random_circulations(rng: &mut ChaCha8Rng, want_spheroid: Option<bool>) -> Circulations {
    loop {
        let g = [0, 1, 2].map(|_| {
            let m: f64 = rng.random_range(0.3..2.0);
            if rng.random_bool(0.5) {
                m
            } else {
                -m
            }
        });
        let c = Circulations::new(g[0], g[1], g[2]).unwrap();
        let s = symmetric_invariants(&c);
        let sums_ok = [g[0] + g[1], g[0] + g[2], g[1] + g[2]].iter().all(|v| v.abs() > 0.2);
        let kind_ok = want_spheroid.is_none_or(|sph| (s.gamma3 / s.gamma1 > 0.0) == sph);
        if sums_ok && s.gamma1.abs() > 0.2 && kind_ok {
            return c;
        }
    }
}

#[test]
fn criterion_01_conservation() {
    let c = Circulations::parse("1/3,1/3,1/3").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for k in 0..5 {
        let cfg = VortexConfiguration::three(&c, random_positions(&mut rng, 1.5, 0.3));
        let traj = integrate_full(&cfg, (0.0, 100.0), 1e-10).unwrap();
        if !traj.completed() {
            failures.push(format!("run {k}: {:?}", traj.termination));
        }
        let drift = traj.diagnostics.iter().map(|d| d.max_drift()).fold(0.0, f64::max);
        worst = worst.max(drift);
        if !(drift <= 1e-8) {
            failures.push(format!("run {k}: drift {drift:.3e}"));
        }
    }
    report(1, "conservation of H, Mx, My, Theta over t in [0, 100]", &failures, format!("max drift {worst:.2e} <= 1e-8"));
}

#[test]
fn criterion_02_reduction_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let outs: Vec<f64> = (1..=100).map(|k| 0.5 * k as f64).collect();
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    let mut kinds = [0usize; 2];
    for k in 0..20 {
        let c = random_circulations(&mut rng, Some(k % 2 == 0));
        let cfg = VortexConfiguration::three(&c, random_positions(&mut rng, 1.5, 0.4));
        let mut fo = FullOptions::new(1e-12);
        fo.output_times = Some(outs.clone());
        let full = integrate_full_with(&cfg, (0.0, 50.0), &fo).unwrap();
        let start = reduce(&cfg).unwrap().state;
        kinds[usize::from(surface_kind(&c, start.theta).unwrap() == SurfaceKind::Spheroid)] += 1;
        let mut ro = ReducedOptions::new(1e-12);
        ro.output_times = Some(outs.clone());
        let red = integrate_reduced_with(&start, (0.0, 50.0), &ro).unwrap();
        if !full.completed() || !red.completed() || full.len() != red.len() {
            failures.push(format!("run {k}: {:?} / {:?}", full.termination, red.termination));
            continue;
        }
        for (a, b) in full.states.iter().zip(&red.states) {
            let (da, db) = (a.pair_distances_sq(), pair_distances_sq(b));
            for p in 0..3 {
                worst = worst.max((da[p] - db[p]).abs() / da[p]);
            }
        }
    }
    if !(worst <= 1e-6) {
        failures.push(format!("relative distance error {worst:.3e}"));
    }
    report(
        2,
        "reduced trajectories reproduce pair distances over t in [0, 50]",
        &failures,
        format!("{} spheroid and {} hyperboloid runs, max relative error {worst:.2e} <= 1e-6", kinds[1], kinds[0]),
    );
}

#[test]
fn criterion_03_hamiltonian_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let c = random_circulations(&mut rng, None);
        let diffs: Vec<f64> = (0..1000)
            .map(|_| {
                let cfg = VortexConfiguration::three(&c, random_positions(&mut rng, 2.0, 0.05));
                reduced_hamiltonian(&reduce(&cfg).unwrap().state).unwrap() - hamiltonian(&cfg).unwrap()
            })
            .collect();
        let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
        let std = (diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / diffs.len() as f64).sqrt();
        worst = worst.max(std);
    }
    let failures = if worst <= 1e-9 { vec![] } else { vec![format!("std {worst:.3e}")] };
    report(3, "reduced energy differs from H by a constant", &failures, format!("5 triples x 1000 configs, max std {worst:.2e} <= 1e-9"));
}

#[test]
fn criterion_04_singularity_mapping() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    let mut checked = 0;
    let mut failures = Vec::new();
    for _ in 0..50 {
        let c = random_circulations(&mut rng, None);
        for pair in Pair::ALL {
            let (i, j) = pair.indices();
            let mut z = random_positions(&mut rng, 2.0, 0.3);
            z[j] = z[i];
            let s = reduce(&VortexConfiguration::three(&c, z)).unwrap().state;
            let Some(want) = singularities(&c, s.theta)[pair.index()].location else { continue };
            let size = s.theta.abs().max(want.iter().fold(0.0f64, |m, v| m.max(v.abs())));
            let err = s.xyz().iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / size;
            worst = worst.max(err);
            checked += 1;
            if !(err <= 1e-12) {
                failures.push(format!("{c} {pair}: error {err:.3e}"));
            }
        }
    }
    report(4, "coincident pairs land on the singular points", &failures, format!("{checked} cases, max relative error {worst:.2e} <= 1e-12"));
}

#[test]
fn criterion_05_equal_circulation_equilibria() {
    let c = Circulations::parse("1/3,1/3,1/3").unwrap();
    let mut failures = Vec::new();
    let y0 = 1.5 * 3f64.sqrt();
    for e in tri_stability(&c, 1.0).unwrap() {
        let s = &e.state;
        if !(s.x.abs() < 1e-9 && (s.y.abs() - y0).abs() < 1e-9 && s.z.abs() < 1e-9) {
            failures.push(format!("equilateral at {:?}", s.xyz()));
        }
        let mut im: Vec<f64> = e.eigenvalues.iter().map(|l| l.im).collect();
        im.sort_by(f64::total_cmp);
        let re = e.eigenvalues.iter().map(|l| l.re.abs()).fold(0.0, f64::max);
        if !(re < 1e-9 && (im[0] + 1.0 / 3.0).abs() < 1e-9 && im[1].abs() < 1e-9 && (im[2] - 1.0 / 3.0).abs() < 1e-9) {
            failures.push(format!("eigenvalues {:?}", e.eigenvalues));
        }
    }
    let col = collinear_equilibria(&c, 1.0).unwrap();
    let mut worst_res = 0.0f64;
    for want in [[0.0, 0.0, 1.0], [2.25, 0.0, -0.5], [-2.25, 0.0, -0.5]] {
        match col.iter().find(|e| e.state.distance_to(want) < 1e-9) {
            Some(e) => worst_res = worst_res.max(e.relative_residual().unwrap()),
            None => failures.push(format!("missing collinear point {want:?}")),
        }
    }
    if col.len() != 3 || worst_res > 1e-10 {
        failures.push(format!("{} collinear points, residual {worst_res:.3e}", col.len()));
    }

    let s = project_to_quadric(&ReducedState::new(0.0, y0 - 1e-3, 7e-4, 1.0, c));
    let mut o = ReducedOptions::new(1e-11);
    o.output_times = Some((1..=4000).map(|k| k as f64 * 0.01).collect());
    let traj = integrate_reduced_with(&s, (0.0, 40.0), &o).unwrap();
    let mut crossings = Vec::new();
    for (w, t) in traj.states.windows(2).zip(traj.times.windows(2)) {
        if w[0].x < 0.0 && w[1].x >= 0.0 {
            crossings.push(t[0] + (t[1] - t[0]) * (-w[0].x) / (w[1].x - w[0].x));
        }
    }
    let period = if crossings.len() >= 2 { crossings[1] - crossings[0] } else { f64::NAN };
    if !((period - 6.0 * PI).abs() <= 0.01 * 6.0 * PI) {
        failures.push(format!("period {period}"));
    }
    report(
        5,
        "equilibria of equal circulations at Theta = 1",
        &failures,
        format!("collinear residual {worst_res:.1e}, oscillation period {period:.5} vs 6pi = {:.5}", 6.0 * PI),
    );
}

#[test]
fn criterion_06_parameter_plane_regions() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = Vec::new();
    let (mut inside, mut outside, mut sample) = (0, 0, 0);
    let margin = 1e-3;
    while sample < 200 {
        let p = cartesian_to_trilinear(rng.random_range(-3.5..3.5), rng.random_range(-3.5..3.5));
        let eta = p.as_array();
        let Ok(c) = p.circulations() else { continue };
        let g = symmetric_invariants(&c);
        let quartic = deltoid_quartic(&c);
        let q_scale = 32.0 * g.gamma2.abs() * g.gamma1 * g.gamma1 + 36.0 * (g.gamma3 * g.gamma1).abs() + 3.0 * g.gamma2 * g.gamma2;
        let g2_scale = (eta[0] * eta[1]).abs() + (eta[0] * eta[2]).abs() + (eta[1] * eta[2]).abs();
        let clear = eta.iter().all(|v| v.abs() > margin)
            && [eta[0] + eta[1], eta[0] + eta[2], eta[1] + eta[2]].iter().all(|v| v.abs() > margin)
            && quartic.abs() > margin * q_scale
            && g.gamma2.abs() > margin * g2_scale;
        if !clear {
            continue;
        }
        sample += 1;

        let sheets: Vec<f64> = match admissible_theta_sign(&c) {
            Some(s) => vec![s],
            None => vec![1.0, -1.0],
        };
        let count: usize = sheets.iter().map(|&t| collinear_equilibria(&c, t).unwrap().len()).sum();
        let expected = if quartic > 0.0 { 3 } else { 1 };
        if quartic > 0.0 {
            inside += 1;
        } else {
            outside += 1;
        }
        if count != expected {
            failures.push(format!("eta {eta:?}: {count} collinear, expected {expected}"));
        }

        let spheroid = surface_kind(&c, sheets[0]).unwrap() == SurfaceKind::Spheroid;
        if spheroid != (g.gamma3 / g.gamma1 > 0.0) {
            failures.push(format!("eta {eta:?}: surface kind"));
        }

        let want = if g.gamma2 > 0.0 { Stability::Center } else { Stability::Saddle };
        for e in tri_stability(&c, sheets[0]).unwrap() {
            if e.classification != want {
                failures.push(format!("eta {eta:?}: equilateral {} with gamma2 {}", e.classification, g.gamma2));
            }
        }
    }
    report(
        6,
        "collinear counts, equilateral stability and surface kind over the parameter plane",
        &failures,
        format!("{inside} points inside the deltoid, {outside} outside"),
    );
}

#[test]
fn criterion_07_symmetric_family() {
    let grid: Vec<f64> = (0..=400).map(|k| ((-2.5 + 0.01 * k as f64) * 1e12).round() / 1e12).collect();
    let rows = bifurcation_scan(&[-1.0, 1.0], &grid);
    let find = |g3: f64, th: f64, b: ScanBranch| -> &ScanRow {
        rows.iter().find(|r| r.gamma3 == g3 && r.theta == th && r.branch == b).unwrap()
    };
    let mut failures = Vec::new();
    let mut checked = 0;
    for &g3 in &grid {
        if [0.0, 1.0, -1.0].contains(&g3) {
            continue;
        }
        for th in [-1.0, 1.0] {
            checked += 1;
            let outer_exists = g3 > -5.0 / 3.0 && g3 < 1.0;
            let outer_sign = if (-1.0..-1.0 / 3.0).contains(&g3) { -1.0 } else { 1.0 };
            let c = Circulations::symmetric(g3).unwrap();
            let on_sheet = admissible_theta_sign(&c).is_none_or(|s| s == th);
            for b in [ScanBranch::E1, ScanBranch::E2] {
                let r = find(g3, th, b);
                let want = outer_exists && th == outer_sign;
                if r.exists != want {
                    failures.push(format!("Gamma3 {g3} Theta {th}: {} exists {} expected {want}", b.name(), r.exists));
                } else if r.exists {
                    let centre = g3 < -1.0 / 3.0;
                    let want = if centre { Stability::Center } else { Stability::Saddle };
                    if r.stability != Some(want) {
                        failures.push(format!("Gamma3 {g3}: {} is {:?}", b.name(), r.stability));
                    }
                }
            }
            let e3 = find(g3, th, ScanBranch::E3);
            let e3_sign = admissible_theta_sign(&c).unwrap_or(1.0);
            if e3.exists != (th == e3_sign) {
                failures.push(format!("Gamma3 {g3} Theta {th}: E3 exists {}", e3.exists));
            } else if e3.exists {
                let want = if outer_exists { Stability::Saddle } else { Stability::Center };
                if e3.stability != Some(want) {
                    failures.push(format!("Gamma3 {g3}: E3 is {:?}", e3.stability));
                }
            }
            for b in [ScanBranch::TriPlus, ScanBranch::TriMinus] {
                let r = find(g3, th, b);
                if !on_sheet {
                    if r.exists {
                        failures.push(format!("Gamma3 {g3}: {} on the excluded spheroid sheet", b.name()));
                    }
                    continue;
                }
                let gamma2 = (1.0 - g3) * (1.0 + 3.0 * g3) / 4.0;
                let want = if gamma2 > 0.0 { Stability::Center } else { Stability::Saddle };
                if r.exists && r.stability != Some(want) {
                    failures.push(format!("Gamma3 {g3}: {} is {:?}", b.name(), r.stability));
                }
            }
        }
    }
    let far = |g3: f64, th: f64| find(g3, th, ScanBranch::E1).x.abs();
    let near_minus_one = [far(-1.01, 1.0), far(-0.99, -1.0)];
    let near_third = [far(-0.34, -1.0), far(-0.33, 1.0)];
    let reference = far(-0.6, -1.0);
    for (label, v) in [("-1", near_minus_one), ("-1/3", near_third)] {
        if !v.iter().all(|x| *x > 10.0 * reference) {
            failures.push(format!("no divergence near Gamma3 = {label}: |X| {v:?} vs {reference}"));
        }
    }
    report(
        7,
        "symmetric family existence windows, stability and divergences",
        &failures,
        format!(
            "{checked} grid samples; |X(E1)| near -1: {:.0}/{:.0}, near -1/3: {:.0}/{:.0}",
            near_minus_one[0], near_minus_one[1], near_third[0], near_third[1]
        ),
    );
}

#[test]
fn criterion_08_collapse() {
    let c = Circulations::parse("2/3,2/3,-1/3").unwrap();
    let report_ = collapse_analysis(&cone_state(&c, 1.0, PI / 4.0).unwrap(), 1e-12).unwrap();
    let want_rate = -2.0 * 3f64.sqrt() / 5.0;
    let want_time = 5.0 / (2.0 * 3f64.sqrt());
    let mut failures = Vec::new();
    if !((report_.radial_rate - want_rate).abs() <= 1e-10) {
        failures.push(format!("dr/dt {}", report_.radial_rate));
    }
    let t = report_.integrated_time.unwrap_or(f64::NAN);
    if !((t - want_time).abs() <= 0.01 * want_time) {
        failures.push(format!("collapse time {t}"));
    }
    report(
        8,
        "self-similar collapse on the cone",
        &failures,
        format!("dr/dt {:.12} vs {want_rate:.12}, time {t:.5} vs {want_time:.5}", report_.radial_rate),
    );
}

fn planted(roots: &[BigRational]) -> QPoly {
    QPoly::from_roots(roots)
}

/// Ray from the centre of the trilinear plane to where the deltoid quartic changes sign.
fn deltoid_crossing(angle: f64) -> Option<Circulations> {
    let f = |t: f64| {
        let c = cartesian_to_trilinear(t * angle.cos(), t * angle.sin()).circulations().ok()?;
        Some(deltoid_quartic(&c))
    };
    let mut lo = 0.0;
    let mut t = 0.01;
    while t < 4.0 {
        if f(t)? < 0.0 {
            let mut hi = t;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(mid)? > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return cartesian_to_trilinear(lo * angle.cos(), lo * angle.sin()).circulations().ok();
        }
        lo = t;
        t += 0.01;
    }
    None
}

#[test]
fn criterion_09_polynomial_toolkit() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures = Vec::new();
    let rat = |rng: &mut ChaCha8Rng| q(rng.random_range(-30..30), rng.random_range(1..12));
    for k in 0..200 {
        let common = rat(&mut rng);
        let mut ra = vec![common.clone()];
        let mut rb = vec![common];
        for _ in 0..rng.random_range(0..4) {
            ra.push(rat(&mut rng));
        }
        for _ in 0..rng.random_range(0..4) {
            rb.push(rat(&mut rng));
        }
        let lead_a = q(rng.random_range(1..9), 1);
        let a = planted(&ra).scale(&lead_a);
        if resultant(&a, &planted(&rb)).unwrap() != q(0, 1) {
            failures.push(format!("planted resultant {k} nonzero"));
        }
    }
    for _ in 0..50 {
        let (a, b, c) = (rat(&mut rng), rat(&mut rng), rat(&mut rng));
        if a == q(0, 1) {
            continue;
        }
        let p = QPoly::new(vec![c.clone(), b.clone(), a.clone()]);
        if discriminant(&p).unwrap() != &b * &b - q(4, 1) * a * c {
            failures.push("quadratic discriminant".into());
        }
    }

    let (mut boundary, mut worst) = (0, 0.0f64);
    let mut k = 0;
    while boundary < 100 && k < 10_000 {
        k += 1;
        let angle: f64 = rng.random_range(0.0..2.0 * PI);
        let Some(c) = deltoid_crossing(angle) else { continue };
        let g = c.as_array();
        let clear =
            g.iter().all(|v| v.abs() > 0.05) && [g[0] + g[1], g[0] + g[2], g[1] + g[2]].iter().all(|v| v.abs() > 0.05);
        if !clear {
            continue;
        }
        let Ok(p) = p3_polynomial(&c, 1.0) else { continue };
        let z: Vec<Complex64> = roots(&p.to_f64());
        if z.len() != 3 {
            continue;
        }
        let size = z.iter().map(|v| v.norm()).fold(1e-300f64, f64::max);
        let gaps = [(z[0] - z[1]).norm(), (z[0] - z[2]).norm(), (z[1] - z[2]).norm()];
        let min_gap = gaps.iter().cloned().fold(f64::INFINITY, f64::min);
        let max_gap = gaps.iter().cloned().fold(0.0, f64::max);
        // a confirmed double root, away from the cusps where all three merge
        if !(min_gap < 1e-5 * size && max_gap > 1e-2 * size) {
            continue;
        }
        boundary += 1;
        let d = discriminant_p3(&c, 1.0).unwrap();
        worst = worst.max(d.scaled.abs());
        if !(d.scaled.abs() <= 1e-10) {
            failures.push(format!("{c}: scaled discriminant {:.3e}", d.scaled));
        }
    }
    if boundary < 100 {
        failures.push(format!("only {boundary} deltoid points found"));
    }
    report(
        9,
        "resultants and discriminants",
        &failures,
        format!("200 planted resultants exact, {boundary} deltoid points with max scaled discriminant {worst:.1e}"),
    );
}

#[test]
fn criterion_10_zero_total_circulation() {
    let (g1, g2) = (2.0, 1.0);
    let mut failures = Vec::new();
    let mut xs: Vec<f64> = zero_singularities(g1, g2).iter().map(|(_, x)| *x).collect();
    xs.sort_by(f64::total_cmp);
    let stated = [-1.5, -1.0, 0.0];
    if xs.iter().zip(stated).any(|(a, b)| (a - b).abs() > 1e-12) {
        failures.push(format!("singular X {xs:?}, stated {stated:?}"));
    }

    let mut grad = 0.0f64;
    for e in zero_equilibria(g1, g2).unwrap() {
        let (hx, hy) = ZeroCircReducedState::new(e.x, e.y, g1, g2).gradient().unwrap();
        grad = grad.max(hx.abs().max(hy.abs()));
        if e.classification != Stability::Saddle {
            failures.push(format!("equilibrium ({}, {}) is {}", e.x, e.y, e.classification));
        }
    }
    if !(grad <= 1e-10) {
        failures.push(format!("gradient {grad:.3e} at the equilibria"));
    }

    let mut drift = 0.0f64;
    for (x, y) in [(0.5, 1.0), (-0.7, 0.4), (1.5, -0.8), (-2.0, 2.0)] {
        let traj = integrate_zero(&ZeroCircReducedState::new(x, y, g1, g2), (0.0, 20.0), 1e-11).unwrap();
        drift = drift.max(traj.diagnostics.iter().map(|d| d.h_drift).fold(0.0, f64::max));
    }
    if !(drift <= 1e-9) {
        failures.push(format!("h drift {drift:.3e}"));
    }

    let (z1, z2) = (Complex64::new(0.3, -0.2), Complex64::new(-0.4, 0.5));
    let dipole = DipoleCanonicalState::from_pair(z1, z2);
    let (vx, vy) = dipole.velocity(1.0).unwrap();
    let cfg = VortexConfiguration::new(vec![z1, z2], vec![1.0, -1.0]).unwrap();
    let v = vortex_velocities(&cfg).unwrap();
    let mut line = (v[0] - Complex64::new(vx, vy)).norm().max((v[1] - Complex64::new(vx, vy)).norm());
    let mut fo = FullOptions::new(1e-12);
    fo.output_times = Some((1..=10).map(|k| k as f64).collect());
    let traj = integrate_full_with(&cfg, (0.0, 10.0), &fo).unwrap();
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let mid = 0.5 * (s.positions[0] + s.positions[1]);
        let want = 0.5 * (z1 + z2) + Complex64::new(vx, vy) * *t;
        line = line.max((mid - want).norm() / t.max(1.0));
    }
    if !(line <= 1e-10) {
        failures.push(format!("dipole off its line by {line:.3e}"));
    }
    report(
        10,
        "vanishing total circulation",
        &failures,
        format!("singular X {xs:?}, gradient {grad:.1e}, h drift {drift:.1e}, dipole error {line:.1e}"),
    );
}

struct Expected {
    label: &'static str,
    gamma3: &'static str,
    theta: f64,
    equilibria: usize,
    singularities: usize,
    heteroclinic: usize,
    homoclinic: usize,
}

const fn row(label: &'static str, gamma3: &'static str, theta: f64, counts: [usize; 4]) -> Expected {
    Expected { label, gamma3, theta, equilibria: counts[0], singularities: counts[1], heteroclinic: counts[2], homoclinic: counts[3] }
}

const POINTS: [Expected; 15] = [
    row("h", "1/3", 1.0, [5, 3, 6, 0]),
    row("g", "1/15", 1.0, [5, 3, 4, 2]),
    row("i", "4/5", 1.0, [5, 3, 4, 2]),
    row("j", "5", -1.0, [3, 3, 4, 0]),
    row("f", "-1/9", 1.0, [5, 2, 4, 2]),
    row("f", "-1/9", -1.0, [0, 1, 0, 0]),
    row("e", "-1/3", 1.0, [1, 2, 0, 2]),
    row("e", "-1/3", -1.0, [0, 1, 0, 0]),
    row("d", "-1/2", 1.0, [1, 2, 0, 2]),
    row("d", "-1/2", -1.0, [4, 1, 4, 0]),
    row("c", "-1", 1.0, [1, 0, 0, 0]),
    row("c", "-1", -1.0, [2, 1, 2, 0]),
    row("b", "-3/2", 1.0, [3, 0, 0, 2]),
    row("b", "-3/2", -1.0, [2, 3, 4, 0]),
    row("a", "-17/3", 1.0, [1, 0, 0, 0]),
];

fn connection_drift(p: &Portrait) -> f64 {
    let curves = p.curves.iter().filter(|c| matches!(c.kind, OrbitKind::Heteroclinic | OrbitKind::Homoclinic));
    curves.map(|c| c.max_h_drift).fold(p.max_connection_gap(), f64::max)
}

#[test]
fn criterion_11_portrait_structure() {
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for e in &POINTS {
        let c = Circulations::symmetric_exact(parse_rational(e.gamma3).unwrap()).unwrap();
        let p = match sample_portrait(&PortraitSpec::new(c, e.theta)) {
            Ok(p) => p,
            Err(err) => {
                failures.push(format!("point {} Theta {}: {err}", e.label, e.theta));
                continue;
            }
        };
        let got = [
            p.equilibria.len(),
            p.singularities.len(),
            p.count_connections(OrbitKind::Heteroclinic),
            p.count_connections(OrbitKind::Homoclinic),
        ];
        let want = [e.equilibria, e.singularities, e.heteroclinic, e.homoclinic];
        if got != want {
            failures.push(format!(
                "point {} Theta {}: [equilibria, singularities, heteroclinic, homoclinic] = {got:?}, expected {want:?}",
                e.label, e.theta
            ));
        }
        let drift = connection_drift(&p);
        worst = worst.max(drift);
        if !(drift <= 1e-9) {
            failures.push(format!("point {} Theta {}: h-level drift {drift:.3e}", e.label, e.theta));
        }
    }
    report(
        11,
        "portrait structure at the ten labelled parameter points",
        &failures,
        format!("{} sheets, max h-level drift on connecting orbits {worst:.1e}", POINTS.len()),
    );
}
