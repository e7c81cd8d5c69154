use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;
use vortex3_core::equilibria::{collinear_equilibria, reduced_jacobian, tri_stability, Equilibrium};
use vortex3_core::model::{finite_gradient, poisson_bracket};
use vortex3_core::poly::{discriminant, q, resultant, roots, QPoly, UniPoly};
use vortex3_core::reduction::{
    integrate_reduced_with, quadric_residual, reduce, reduced_hamiltonian, reduced_vector_field, ReducedOptions,
};
use vortex3_core::zero_circ::{h_zero, zero_equilibria};
use vortex3_core::{
    conserved_quantities, hamiltonian, integrate_full, symmetric_invariants, vortex_velocities, Circulations,
    VortexConfiguration,
};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 64, ..ProptestConfig::default() }
}

fn strength() -> impl Strategy<Value = f64> {
    prop_oneof![-3.0..-0.2f64, 0.2..3.0f64]
}

/// Circulations away from the degenerate loci of the reduction.
fn circulations() -> impl Strategy<Value = Circulations> {
    (strength(), strength(), strength())
        .prop_filter("generic circulations", |&(a, b, c)| {
            let g = symmetric_invariants(&Circulations::new(a, b, c).unwrap());
            [a + b, a + c, b + c].iter().all(|s| s.abs() > 0.1) && g.gamma1.abs() > 0.1 && g.gamma3.abs() > 0.05
        })
        .prop_map(|(a, b, c)| Circulations::new(a, b, c).unwrap())
}

fn positions() -> impl Strategy<Value = [Complex64; 3]> {
    prop::array::uniform3((-2.0..2.0f64, -2.0..2.0f64))
        .prop_map(|p| p.map(|(x, y)| Complex64::new(x, y)))
        .prop_filter("separated vortices", |z| {
            (z[0] - z[1]).norm() > 0.2 && (z[0] - z[2]).norm() > 0.2 && (z[1] - z[2]).norm() > 0.2
        })
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn velocities_are_the_symplectic_gradient(c in circulations(), z in positions()) {
        let cfg = VortexConfiguration::three(&c, z);
        let v = vortex_velocities(&cfg).unwrap();
        let grad = finite_gradient(&cfg, &hamiltonian, 1e-6).unwrap();
        for j in 0..3 {
            let dh = 0.5 * Complex64::new(grad[2 * j], grad[2 * j + 1]);
            let want = Complex64::new(0.0, -2.0) / cfg.circulations[j] * dh;
            prop_assert!((v[j] - want).norm() <= 1e-6 * v[j].norm().max(1.0));
        }
    }

    #[test]
    fn rigid_motions_preserve_energy(c in circulations(), z in positions(), psi in 0.0..6.3f64, a in (-5.0..5.0f64, -5.0..5.0f64)) {
        let cfg = VortexConfiguration::three(&c, z);
        let moved = cfg.transformed(psi, Complex64::new(a.0, a.1));
        prop_assert!((hamiltonian(&moved).unwrap() - hamiltonian(&cfg).unwrap()).abs() < 1e-12);
        let rot = Complex64::from_polar(1.0, psi);
        for (u, w) in vortex_velocities(&cfg).unwrap().iter().zip(vortex_velocities(&moved).unwrap()) {
            prop_assert!((rot * u - w).norm() < 1e-10 * u.norm().max(1.0));
        }
    }

    #[test]
    fn brackets_match_time_derivatives(c in circulations(), z in positions()) {
        let cfg = VortexConfiguration::three(&c, z);
        let v = vortex_velocities(&cfg).unwrap();
        let observables: [fn(&VortexConfiguration) -> vortex3_core::Result<f64>; 3] = [
            |s| Ok(conserved_quantities(s)?.theta),
            |s| Ok(conserved_quantities(s)?.m.re),
            |s| Ok(conserved_quantities(s)?.m.im),
        ];
        let scale: f64 = cfg.circulations.iter().zip(&v).map(|(g, u)| g.abs() * u.norm() * 4.0).sum();
        for f in observables {
            let grad = finite_gradient(&cfg, &f, 1e-6).unwrap();
            let dfdt: f64 = (0..3).map(|j| grad[2 * j] * v[j].re + grad[2 * j + 1] * v[j].im).sum();
            let bracket = poisson_bracket(&cfg, f, hamiltonian, 1e-6).unwrap();
            prop_assert!((dfdt - bracket).abs() <= 1e-6 * scale.max(1.0), "{dfdt} vs {bracket}");
        }
    }

    #[test]
    fn momentum_map_has_rank_one(c in circulations(), z in positions()) {
        let r = reduce(&VortexConfiguration::three(&c, z)).unwrap();
        let m = r.momentum;
        let size = (m.mu1 * m.mu2).abs() + m.mu3 * m.mu3 + m.mu4 * m.mu4;
        prop_assert!(m.rank_defect().abs() <= 1e-12 * size);
    }

    #[test]
    fn reduced_states_lie_on_the_quadric(c in circulations(), z in positions()) {
        let s = reduce(&VortexConfiguration::three(&c, z)).unwrap().state;
        let g = symmetric_invariants(&c);
        let size = s.theta * s.theta + s.z * s.z + (4.0 * g.gamma3 / g.gamma1 * (s.x * s.x + s.y * s.y)).abs();
        prop_assert!(quadric_residual(&s).abs() <= 1e-12 * size);
    }

    #[test]
    fn reduced_energy_ignores_y(c in circulations(), z in positions(), dy in -1.0..1.0f64) {
        let s = reduce(&VortexConfiguration::three(&c, z)).unwrap().state;
        let h = reduced_hamiltonian(&s).unwrap();
        let shifted = reduced_hamiltonian(&s.with_xyz([s.x, s.y + dy, s.z])).unwrap();
        prop_assert!((h - shifted).abs() <= 1e-9 * h.abs().max(1.0));
    }

    #[test]
    fn reduction_is_rotation_invariant(c in circulations(), z in positions(), psi in 0.0..6.3f64, z0 in (-3.0..3.0f64, -3.0..3.0f64)) {
        let a = reduce(&VortexConfiguration::three(&c, z)).unwrap().state;
        let z0 = Complex64::new(z0.0, z0.1);
        let rot = Complex64::from_polar(1.0, psi);
        let moved = z.map(|p| rot * (p - z0) + z0);
        let b = reduce(&VortexConfiguration::three(&c, moved)).unwrap().state;
        let size = a.x.abs() + a.y.abs() + a.z.abs() + a.theta.abs();
        for (u, w) in [(a.x, b.x), (a.y, b.y), (a.z, b.z), (a.theta, b.theta)] {
            prop_assert!((u - w).abs() <= 1e-12 * size.max(1.0));
        }
    }

    #[test]
    fn collinear_iff_y_vanishes(c in circulations(), base in (-2.0..2.0f64, -2.0..2.0f64), dir in 0.0..6.3f64,
                                t in prop::array::uniform3(-2.0..2.0f64), lift in 0.05..1.0f64) {
        prop_assume!((t[0] - t[1]).abs() > 0.2 && (t[0] - t[2]).abs() > 0.2 && (t[1] - t[2]).abs() > 0.2);
        let o = Complex64::new(base.0, base.1);
        let e = Complex64::from_polar(1.0, dir);
        let line = t.map(|s| o + e * s);
        let s = reduce(&VortexConfiguration::three(&c, line)).unwrap().state;
        let size = s.x.abs() + s.z.abs() + s.theta.abs();
        prop_assert!(s.y.abs() <= 1e-12 * size.max(1.0));
        let mut bent = line;
        bent[2] += e * Complex64::new(0.0, lift);
        let s = reduce(&VortexConfiguration::three(&c, bent)).unwrap().state;
        prop_assert!(s.y.abs() > 1e-6);
    }

    #[test]
    fn equilibria_are_stationary_with_odd_spectrum(c in circulations(), theta in prop_oneof![-2.0..-0.3f64, 0.3..2.0f64]) {
        let mut list: Vec<Equilibrium> = match collinear_equilibria(&c, theta) {
            Ok(v) => v,
            Err(_) => return Ok(()),
        };
        if let Ok(tris) = tri_stability(&c, theta) {
            list.extend(tris.into_iter().filter(|e| e.admissible));
        }
        for e in &list {
            prop_assert!(e.relative_residual().unwrap() < 1e-10, "{:?}", e.state);
            let s = &e.state;
            prop_assert!(quadric_residual(s).abs() <= 1e-10 * (s.theta * s.theta + s.z * s.z).max(1.0));
            let j = reduced_jacobian(s).unwrap();
            let scale = j.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
            prop_assert!(j.trace().abs() <= 1e-9 * scale);
            prop_assert!(j.determinant().abs() <= 1e-9 * scale.powi(3));
            let lam2 = e.eigenvalues.iter().map(|l| l.norm_sqr()).fold(0.0, f64::max);
            prop_assert!((lam2 - e.r.abs()).abs() <= 1e-8 * e.r.abs().max(scale * scale * 1e-6));
        }
    }

    #[test]
    fn equal_pair_equilibria_are_mirror_symmetric(g1 in strength(), g3 in strength(), theta in prop_oneof![-2.0..-0.3f64, 0.3..2.0f64]) {
        prop_assume!((g1 + g3).abs() > 0.1 && (2.0 * g1 + g3).abs() > 0.1);
        let c = Circulations::new(g1, g1, g3).unwrap();
        prop_assume!(symmetric_invariants(&c).gamma3.abs() > 0.05);
        let Ok(list) = collinear_equilibria(&c, theta) else { return Ok(()) };
        for e in &list {
            let s = &e.state;
            let scale = s.x.abs().max(s.z.abs()).max(theta.abs());
            let mirrored = list.iter().any(|o| (o.state.x + s.x).abs() < 1e-8 * scale && (o.state.z - s.z).abs() < 1e-8 * scale);
            prop_assert!(mirrored, "{:?}", s);
        }
    }

    #[test]
    fn resultant_vanishes_on_planted_roots(r in -20i64..20, d in 1i64..9, a in prop::collection::vec(-9i64..9, 1..4), b in prop::collection::vec(-9i64..9, 1..4)) {
        let root = q(r, d);
        let planted = |others: &[i64]| {
            let mut roots: Vec<BigRational> = others.iter().map(|&k| q(k, 1)).collect();
            roots.push(root.clone());
            QPoly::from_roots(&roots)
        };
        let res = resultant(&planted(&a), &planted(&b)).unwrap();
        prop_assert_eq!(res, q(0, 1));
    }

    #[test]
    fn resultant_symmetry_and_discriminant_product(a in prop::collection::vec(-6i64..6, 2..5), b in prop::collection::vec(-6i64..6, 2..4)) {
        let pa = QPoly::new(a.iter().map(|&k| q(k, 1)).collect());
        let pb = QPoly::new(b.iter().map(|&k| q(k, 1)).collect());
        let (Some(m), Some(n)) = (pa.degree(), pb.degree()) else { return Ok(()) };
        prop_assume!(m >= 1 && n >= 1);
        let ab = resultant(&pa, &pb).unwrap();
        let ba = resultant(&pb, &pa).unwrap();
        let sign = if (m * n) % 2 == 0 { q(1, 1) } else { q(-1, 1) };
        prop_assert_eq!(ab.clone(), sign * ba);
        if m >= 2 && n >= 2 {
            let prod = &pa * &pb;
            let lhs = discriminant(&prod).unwrap();
            let rhs = discriminant(&pa).unwrap() * discriminant(&pb).unwrap() * ab.clone() * ab;
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn roots_round_trip(mut planted in prop::collection::vec(-5.0..5.0f64, 1..7)) {
        planted.sort_by(f64::total_cmp);
        prop_assume!(planted.windows(2).all(|w| w[1] - w[0] > 0.1));
        let p = UniPoly::<f64>::from_roots(&planted);
        let mut found: Vec<f64> = roots(&p).iter().map(|z| z.re).collect();
        found.sort_by(f64::total_cmp);
        prop_assert_eq!(found.len(), planted.len());
        for (x, y) in found.iter().zip(&planted) {
            prop_assert!((x - y).abs() < 1e-10, "{x} vs {y}");
        }
    }

    #[test]
    fn zero_circulation_energy_is_even_in_y(g1 in strength(), g2 in strength(), x in -4.0..4.0f64, y in 0.01..4.0f64) {
        prop_assume!((g1 + g2).abs() > 0.1);
        let a = h_zero(x, y, g1, g2);
        let b = h_zero(x, -y, g1, g2);
        prop_assert_eq!(a.is_ok(), b.is_ok());
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0));
        }
    }

    #[test]
    fn zero_circulation_equilibria_are_saddles(g1 in strength(), g2 in strength()) {
        prop_assume!((g1 + g2).abs() > 0.1);
        let [up, down] = zero_equilibria(g1, g2).unwrap();
        prop_assert!(up.hessian_det < 0.0 && down.hessian_det < 0.0);
        prop_assert_eq!(up.h, down.h);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn integration_conserves_invariants(c in circulations(), z in positions()) {
        let traj = integrate_full(&VortexConfiguration::three(&c, z), (0.0, 5.0), 1e-10).unwrap();
        prop_assume!(traj.completed());
        for d in &traj.diagnostics {
            prop_assert!(d.max_drift() <= 100.0 * 1e-10 * 10.0, "{:?}", d);
        }
    }

    #[test]
    fn reduced_flow_keeps_the_quadric(c in circulations(), z in positions()) {
        let s = reduce(&VortexConfiguration::three(&c, z)).unwrap().state;
        prop_assume!(reduced_vector_field(&s).is_ok());
        let traj = integrate_reduced_with(&s, (0.0, 5.0), &ReducedOptions::new(1e-10)).unwrap();
        let size = s.theta * s.theta + s.z * s.z + s.x * s.x + s.y * s.y;
        for d in &traj.diagnostics {
            prop_assert!(d.quadric_residual.abs() <= 1e-8 * size);
        }
    }
}
