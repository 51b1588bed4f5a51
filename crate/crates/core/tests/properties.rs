use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dirichlet_core::geometry::panelize_at_least;
use dirichlet_core::identities::{recover_surface_density, SurfaceProbes};
use dirichlet_core::potential::surface_potential;
use dirichlet_core::variational::{dirichlet_energy, dirichlet_form, solve, BoundaryData, SolverOptions};
use dirichlet_core::{build_grid, panelize, Domain, Grid3, NodeLabel, ScalarField, Vec3};

fn domain_strategy() -> impl Strategy<Value = Domain> {
    prop_oneof![
        (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, 0.4..1.5f64)
            .prop_map(|(x, y, z, r)| Domain::Ball { center: Vec3::new(x, y, z), radius: r }),
        (-1.0..1.0f64, -1.0..1.0f64, 0.4..1.2f64, 0.4..1.2f64, 0.4..1.2f64).prop_map(|(x, y, a, b, c)| {
            let lo = Vec3::new(x, y, 0.0);
            Domain::Box { lo, hi: lo + Vec3::new(a, b, c) }
        }),
    ]
}

fn random_field(grid: &Arc<Grid3>, seed: u64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
    ScalarField::new(grid.clone(), values).unwrap()
}

fn cube(h: f64) -> Arc<Grid3> {
    Arc::new(build_grid(Domain::unit_cube(), h, 0.0).unwrap())
}

/// Smooth but not harmonic boundary data.
fn wavy(a: f64, b: f64) -> impl Fn(&Vec3) -> f64 {
    move |p: &Vec3| (a * p.x).sin() + (b * p.y * p.z).cos() + p.z * p.z
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn node_labels_partition_the_grid(domain in domain_strategy(), h in 0.08..0.25f64, pad in 0.0..0.4f64) {
        let g = build_grid(domain, h, pad).unwrap();
        for idx in 0..g.len() {
            let touches_interior = g.neighbors(idx).any(|n| g.label(n) == NodeLabel::Interior);
            match g.label(idx) {
                NodeLabel::Interior => {
                    prop_assert!(domain.contains_strictly(&g.position(idx), 0.0));
                    prop_assert!(g.has_full_stencil(idx));
                    prop_assert!(g.neighbors(idx).all(|n| g.label(n) != NodeLabel::Exterior));
                }
                NodeLabel::Boundary => prop_assert!(touches_interior),
                NodeLabel::Exterior => prop_assert!(!touches_interior),
            }
        }
        let counts: usize = [NodeLabel::Interior, NodeLabel::Boundary, NodeLabel::Exterior].iter().map(|&l| g.count(l)).sum();
        prop_assert_eq!(counts, g.len());
    }

    #[test]
    fn panels_point_outward_and_tile_the_surface(domain in domain_strategy(), n in 2usize..16) {
        let mesh = panelize(&domain, n).unwrap();
        let (lo, hi) = domain.bounding_box();
        let centre = 0.5 * (lo + hi);
        for p in mesh.iter() {
            prop_assert!((p.normal.norm() - 1.0).abs() < 1e-12);
            prop_assert!((p.centroid - centre).dot(&p.normal) > 0.0);
            prop_assert!(domain.distance_to_boundary(&p.centroid) < 1e-12);
        }
        let area = domain.surface_area();
        prop_assert!((mesh.total_area() - area).abs() <= 1e-9 * area);
    }

    #[test]
    fn dirichlet_form_is_symmetric_and_bilinear(seed in any::<u64>(), a in -2.0..2.0f64) {
        let g = Arc::new(build_grid(Domain::unit_ball(), 0.2, 0.2).unwrap());
        let (u, v, w) = (random_field(&g, seed), random_field(&g, seed ^ 1), random_field(&g, seed ^ 2));
        let uv = dirichlet_form(&u, &v).unwrap();
        let scale = dirichlet_energy(&u) + dirichlet_energy(&v) + dirichlet_energy(&w);
        prop_assert!((uv - dirichlet_form(&v, &u).unwrap()).abs() <= 1e-12 * scale);
        prop_assert!((dirichlet_form(&u, &u).unwrap() - dirichlet_energy(&u)).abs() <= 1e-12 * scale);
        let lhs = dirichlet_form(&u.combine(1.0, &v, a).unwrap(), &w).unwrap();
        let rhs = dirichlet_form(&u, &w).unwrap() + a * dirichlet_form(&v, &w).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + a.abs()) * scale);
    }

    #[test]
    fn solution_does_not_depend_on_initial_iterate(seed in any::<u64>(), a in 0.5..4.0f64, b in 0.5..4.0f64) {
        let g = cube(0.125);
        let data = BoundaryData::from_fn(g.clone(), wavy(a, b)).unwrap();
        let tol = 1e-10;
        let plain = solve(&data, &SolverOptions { tol, ..Default::default() }).unwrap();
        let start = random_field(&g, seed).combine(100.0, &ScalarField::zeros(g.clone()), 0.0).unwrap();
        let warm = solve(&data, &SolverOptions { tol, initial: Some(start), ..Default::default() }).unwrap();
        // the inverse of the scaled operator has ∞-norm about 3.6 at h = 1/8,
        // so each iterate lies within 3.6 tol (1 + max|f|) of the exact solution
        let bound = 10.0 * tol * (1.0 + data.max_abs());
        let diff = plain.field.combine(1.0, &warm.field, -1.0).unwrap().max_abs();
        prop_assert!(diff <= bound, "diff {diff:e} bound {bound:e}");
    }

    #[test]
    fn solution_minimizes_energy_and_respects_bounds(seed in any::<u64>(), a in 0.5..4.0f64, b in 0.5..4.0f64) {
        let g = Arc::new(build_grid(Domain::unit_ball(), 0.15, 0.0).unwrap());
        let data = BoundaryData::from_fn(g.clone(), wavy(a, b)).unwrap();
        let res = solve(&data, &SolverOptions { tol: 1e-12, ..Default::default() }).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lo, hi) = data.range();
        let noise: Vec<f64> = (0..g.len()).map(|_| rng.random_range(lo..hi)).collect();
        let other = data.extend(|i| noise[i]);
        prop_assert!(res.dirichlet_energy <= dirichlet_energy(&other) + 1e-12);
        let flat = data.extend(|_| 0.5 * (lo + hi));
        prop_assert!(res.dirichlet_energy <= dirichlet_energy(&flat) + 1e-12);
        let slack = 1e-9 * (1.0 + data.max_abs());
        for i in g.nodes_with(NodeLabel::Interior) {
            let v = res.field.value(i);
            prop_assert!(v >= lo - slack && v <= hi + slack);
        }
    }

    #[test]
    fn surface_recovery_is_linear(alpha in -3.0..3.0f64, beta in -3.0..3.0f64, delta in 0.01..0.1f64) {
        let mesh = panelize(&Domain::unit_ball(), 10).unwrap();
        let u1 = |p: &Vec3| p.x.exp() + p.norm();
        let u2 = |p: &Vec3| p.y / (1.0 + p.norm_squared());
        let s1 = recover_surface_density(&mesh, &SurfaceProbes::sample(&mesh, delta, u1).unwrap()).unwrap();
        let s2 = recover_surface_density(&mesh, &SurfaceProbes::sample(&mesh, delta, u2).unwrap()).unwrap();
        let mixed = SurfaceProbes::sample(&mesh, delta, |p| alpha * u1(p) + beta * u2(p)).unwrap();
        let s = recover_surface_density(&mesh, &mixed).unwrap();
        for i in 0..mesh.len() {
            let expect = alpha * s1[i] + beta * s2[i];
            prop_assert!((s[i] - expect).abs() <= 1e-9 * (1.0 + s1[i].abs() + s2[i].abs()) / delta);
        }
    }

    #[test]
    fn uniform_shell_potential(r in 0.0..0.6f64, far in 1.5..5.0f64, theta in 0.0..PI, phi in 0.0..(2.0 * PI)) {
        let mesh = panelize_at_least(&Domain::unit_ball(), 1250).unwrap();
        let dir = Vec3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
        let u = surface_potential(&mesh, &vec![1.0; mesh.len()], &[dir * r, dir * far]).unwrap();
        let q = 4.0 * PI;
        prop_assert!((u[0] - q).abs() <= 5e-3 * q, "inside {} vs {q}", u[0]);
        prop_assert!((u[1] - q / far).abs() <= 1e-3 * q / far, "outside {} vs {}", u[1], q / far);
    }
}
