use std::f64::consts::PI;

use dtnlab::domain::DomainGrid;
use dtnlab::geometry::BoundaryCurve;
use dtnlab::operator::{CoefficientField, DiscreteOperator, OperatorKind, OperatorSpec};
use dtnlab::solver::EllipticSolver;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn two_controls(kind: OperatorKind) -> OperatorSpec {
    OperatorSpec::bellman(
        kind,
        vec![
            CoefficientField::Constant { a1: 1.0, a2: 3.0 },
            CoefficientField::Constant { a1: 3.0, a2: 1.0 },
        ],
        1.0,
        3.0,
        "toy",
    )
}

/// Jacobi value iteration for `min_a L^a U = 0`: each node takes the smallest
/// of the per-control local averages, which is the root of the monotone
/// scalar equation at that node.
fn value_iteration(op: &DiscreteOperator, grid: &DomainGrid, g: &[f64], is_min: bool) -> Vec<f64> {
    let mut u = vec![0.0; grid.len()];
    for _ in 0..200_000 {
        let mut next = u.clone();
        let mut change: f64 = 0.0;
        for n in 0..grid.len() {
            let cands = op
                .controls
                .iter()
                .map(|st| u[n] + st.apply_row(grid, n, &u, g) / -st.diagonal(n));
            let v = if is_min {
                cands.fold(f64::INFINITY, f64::min)
            } else {
                cands.fold(f64::NEG_INFINITY, f64::max)
            };
            change = change.max((v - u[n]).abs());
            next[n] = v;
        }
        u = next;
        if change < 1e-14 {
            break;
        }
    }
    u
}

#[test]
fn eight_by_eight_toy_matches_value_iteration() {
    // h = 1/4 on the unit disk: an 8×8 lattice box with the corners outside.
    let curve = BoundaryCurve::unit_disk();
    let grid = DomainGrid::build(&curve, 0.25).unwrap();
    let xs: std::collections::BTreeSet<i64> = grid
        .nodes()
        .iter()
        .map(|n| (n.pos[0] * 8.0).round() as i64)
        .collect();
    assert_eq!(xs.len(), 8);
    let g = grid.cut_values_fn(|_, p| (3.0 * p[0]).sin() + p[1] * p[1] - 0.5 * p[0] * p[1]);
    for kind in [OperatorKind::BellmanMin, OperatorKind::BellmanMax] {
        let spec = two_controls(kind);
        let solver = EllipticSolver::new(&spec, &grid).unwrap();
        let pi = solver.policy_iteration(&g, None).unwrap();
        let op = DiscreteOperator::assemble(&spec, &grid).unwrap();
        let vi = value_iteration(&op, &grid, &g, kind == OperatorKind::BellmanMin);
        let err = pi
            .values
            .iter()
            .zip(&vi)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(
            err <= 1e-8,
            "{kind:?}: policy vs value iteration differ by {err}"
        );
        // Both controls actually used.
        let policy = pi.policy.unwrap();
        assert!(policy.contains(&0) && policy.contains(&1));
    }
}

#[test]
fn policy_iteration_residual_is_non_increasing() {
    let curve = BoundaryCurve::ellipse(1.5, 1.0).unwrap();
    let grid = DomainGrid::build(&curve, 1.0 / 16.0).unwrap();
    let g = grid.cut_values_fn(|_, p| (2.0 * p[0]).cos() * p[1] + p[0] * p[0]);
    let solver = EllipticSolver::new(
        &OperatorSpec::pucci(OperatorKind::BellmanMin, 1.0, 2.0),
        &grid,
    )
    .unwrap();
    let sol = solver.policy_iteration(&g, None).unwrap();
    let h = &sol.residual_history;
    assert!(
        h.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-12),
        "{h:?}"
    );
}

#[test]
fn constant_data_converges_in_one_iteration() {
    let curve = BoundaryCurve::unit_disk();
    let grid = DomainGrid::build(&curve, 1.0 / 8.0).unwrap();
    let solver = EllipticSolver::new(
        &OperatorSpec::pucci(OperatorKind::BellmanMax, 1.0, 2.0),
        &grid,
    )
    .unwrap();
    let sol = solver.solve_cuts(&vec![2.5; grid.cuts().len()]).unwrap();
    assert_eq!(sol.iterations, 1);
    assert!(sol.values.iter().all(|v| (v - 2.5).abs() < 1e-12));
}

#[test]
fn bellman_min_lies_below_max_and_below_frozen_policies() {
    let curve = BoundaryCurve::ellipse(1.5, 1.0).unwrap();
    let grid = DomainGrid::build(&curve, 1.0 / 16.0).unwrap();
    let min = EllipticSolver::new(&two_controls(OperatorKind::BellmanMin), &grid).unwrap();
    let max = EllipticSolver::new(&two_controls(OperatorKind::BellmanMax), &grid).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let (a, b, c) = (
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(1.0..3.0),
        );
        let g = grid.cut_values_fn(|_, p| a * p[0] * p[0] + b * p[1] + (c * p[0] * p[1]).sin());
        let lo = min.solve_cuts(&g).unwrap().values;
        let hi = max.solve_cuts(&g).unwrap().values;
        assert!(lo.iter().zip(&hi).all(|(l, u)| l <= &(u + 1e-12)));
        for _ in 0..20 {
            let policy: Vec<usize> = (0..grid.len()).map(|_| rng.gen_range(0..2)).collect();
            let frozen = min
                .frozen_system(&policy)
                .unwrap()
                .solve_dirichlet(&grid, &g)
                .values;
            assert!(lo.iter().zip(&frozen).all(|(l, f)| l <= &(f + 1e-12)));
        }
    }
}

#[test]
fn linear_solutions_obey_maximum_principle_and_comparison() {
    let curve = BoundaryCurve::star(0.2, 3).unwrap();
    let grid = DomainGrid::build(&curve, 1.0 / 32.0).unwrap();
    let field = CoefficientField::holder(1.0, 2.0, 0.5, [0.1, 0.0], 1.5, [0.3, 1.1]);
    for spec in [
        OperatorSpec::divergence(field.clone(), 1.0, 2.0, "div"),
        OperatorSpec::nondivergence(field.clone(), 1.0, 2.0, "nondiv"),
    ] {
        let solver = EllipticSolver::new(&spec, &grid).unwrap();
        let phi = grid.cut_values_fn(|s, _| (3.0 * s).sin());
        let psi: Vec<f64> = phi
            .iter()
            .enumerate()
            .map(|(k, v)| v + 0.1 * ((k % 7) as f64))
            .collect();
        let u = solver.solve_cuts(&phi).unwrap();
        let v = solver.solve_cuts(&psi).unwrap();
        assert!(u.residual <= 1e-10);
        let (lo, hi) = phi
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
                (a.min(x), b.max(x))
            });
        assert!(u.values.iter().all(|&x| x >= lo - 1e-12 && x <= hi + 1e-12));
        assert!(u
            .values
            .iter()
            .zip(&v.values)
            .all(|(a, b)| a <= &(b + 1e-12)));
    }
}

#[test]
fn disk_green_function_at_half_radius() {
    let curve = BoundaryCurve::unit_disk();
    let grid = DomainGrid::build(&curve, 1.0 / 64.0).unwrap();
    let solver = EllipticSolver::new(&OperatorSpec::laplacian(), &grid).unwrap();
    // Source at the node nearest the centre; compare at nodes with |y − x0| ≈ 0.5.
    let src = grid.nearest_node([0.0, 0.0]).unwrap();
    let y0 = grid.node(src).pos;
    let g = solver.green(src).unwrap();
    assert!(g.iter().all(|&v| v >= 0.0));
    let expected = 2f64.ln() / (2.0 * PI);
    let mut checked = 0;
    for (n, node) in grid.nodes().iter().enumerate() {
        let r = (node.pos[0] - y0[0]).hypot(node.pos[1] - y0[1]);
        if (r - 0.5).abs() < 0.5 / 64.0 {
            let exact = dtnlab::estimates::disk_green(node.pos, y0);
            assert!((g[n] / exact - 1.0).abs() < 0.05, "G = {} vs {exact}", g[n]);
            checked += 1;
        }
    }
    assert!(checked > 10);
    assert!((dtnlab::estimates::disk_green([0.5, 0.0], [0.0, 0.0]) - expected).abs() < 1e-15);
}

#[test]
fn symmetric_divergence_form_green_function_is_symmetric() {
    let curve = BoundaryCurve::ellipse(1.5, 1.0).unwrap();
    let grid = DomainGrid::build(&curve, 1.0 / 16.0).unwrap();
    let field = CoefficientField::holder(1.0, 2.0, 0.5, [0.3, 0.2], 2.0, [0.0, 1.0]);
    let solver =
        EllipticSolver::new(&OperatorSpec::divergence(field, 1.0, 2.0, "div"), &grid).unwrap();
    let (a, b) = (
        grid.nearest_node([-0.6, 0.1]).unwrap(),
        grid.nearest_node([0.7, -0.3]).unwrap(),
    );
    let (ga, gb) = (solver.green(a).unwrap(), solver.green(b).unwrap());
    assert!((ga[b] - gb[a]).abs() <= 1e-10 * ga[b].abs().max(1.0));
}

#[test]
fn harmonic_measure_of_an_arc_from_the_centre() {
    let curve = BoundaryCurve::unit_disk();
    let grid = DomainGrid::build(&curve, 1.0 / 64.0).unwrap();
    let bgrid = curve.build_boundary_grid(256).unwrap();
    let solver = EllipticSolver::new(&OperatorSpec::laplacian(), &grid).unwrap();
    for a in [0.5, 1.0, 2.0] {
        let w = solver
            .harmonic_measure(&bgrid, [0.0, 0.0], &[(0.3, 0.3 + a)])
            .unwrap();
        assert!(
            (w - a / (2.0 * PI)).abs() < 4.0 / 64.0 * a / (2.0 * PI) + 1e-3,
            "arc {a}: {w}"
        );
    }
}

#[test]
fn off_centre_harmonic_measure_matches_poisson_kernel() {
    let curve = BoundaryCurve::unit_disk();
    let grid = DomainGrid::build(&curve, 1.0 / 256.0).unwrap();
    let bgrid = curve.build_boundary_grid(1024).unwrap();
    let solver = EllipticSolver::new(&OperatorSpec::laplacian(), &grid).unwrap();
    let x = [0.4, -0.2];
    let (a, b) = (0.5, 2.0);
    let w = solver.harmonic_measure(&bgrid, x, &[(a, b)]).unwrap();
    let gl = dtnlab::quadrature::GaussLegendre::new(16);
    let r2 = x[0] * x[0] + x[1] * x[1];
    let exact = gl.integrate_composite(a, b, 32, |t| {
        let d2 = (x[0] - t.cos()).powi(2) + (x[1] - t.sin()).powi(2);
        (1.0 - r2) / (2.0 * PI * d2)
    });
    assert!((w / exact - 1.0).abs() < 0.02, "{w} vs {exact}");
}
