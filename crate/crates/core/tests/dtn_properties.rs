use std::f64::consts::TAU;
use std::sync::OnceLock;

use dtnlab::domain::DomainGrid;
use dtnlab::dtn::{check_gcp, extremal_operator, DtNMatrix, DtnOperator, Extremal};
use dtnlab::geometry::{BoundaryCurve, BoundaryGrid};
use dtnlab::operator::{CoefficientField, OperatorKind, OperatorSpec};
use proptest::prelude::*;

const NB: usize = 64;

struct Fixture {
    grid: DomainGrid,
    bgrid: BoundaryGrid,
}

fn ellipse() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let c = BoundaryCurve::ellipse(1.5, 1.0).unwrap();
        Fixture {
            grid: DomainGrid::build(&c, 1.0 / 16.0).unwrap(),
            bgrid: c.build_boundary_grid(NB).unwrap(),
        }
    })
}

fn holder_spec() -> OperatorSpec {
    OperatorSpec::nondivergence(
        CoefficientField::holder(1.0, 2.0, 0.5, [0.3, 0.2], 2.0, [0.5, 2.0]),
        1.0,
        2.0,
        "nondiv",
    )
}

fn data(bgrid: &BoundaryGrid, c: &[f64]) -> Vec<f64> {
    let p = bgrid.perimeter();
    bgrid.sample(|s| {
        c.iter()
            .enumerate()
            .map(|(k, a)| a * ((k + 1) as f64 * TAU * s / p + k as f64).sin())
            .sum()
    })
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn linear_maps_are_linear(a in -2.0f64..2.0, b in -2.0f64..2.0, c1 in coeffs(), c2 in coeffs()) {
        let f = ellipse();
        let op = DtnOperator::new(&holder_spec(), &f.grid, &f.bgrid).unwrap();
        let (u, v) = (data(&f.bgrid, &c1), data(&f.bgrid, &c2));
        let mix: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect();
        let (iu, iv, im) = (op.evaluate(&u).unwrap(), op.evaluate(&v).unwrap(), op.evaluate(&mix).unwrap());
        for i in 0..NB {
            prop_assert!((im[i] - a * iu[i] - b * iv[i]).abs() <= 1e-8 * (1.0 + im[i].abs()));
        }
    }

    #[test]
    fn bellman_maps_commute_with_constants_and_positive_scaling(c in coeffs(), shift in -3.0f64..3.0, t in 0.1f64..4.0) {
        let f = ellipse();
        let op = extremal_operator(Extremal::Minus, 1.0, 2.0, &f.grid, &f.bgrid).unwrap();
        let u = data(&f.bgrid, &c);
        let base = op.evaluate(&u).unwrap();
        let shifted = op.evaluate(&u.iter().map(|x| x + shift).collect::<Vec<_>>()).unwrap();
        let scaled = op.evaluate(&u.iter().map(|x| t * x).collect::<Vec<_>>()).unwrap();
        for i in 0..NB {
            prop_assert!((shifted[i] - base[i]).abs() <= 1e-7 * (1.0 + base[i].abs()));
            prop_assert!((scaled[i] - t * base[i]).abs() <= 1e-7 * (1.0 + t * base[i].abs()));
        }
    }

    #[test]
    fn extremal_maps_sandwich_every_operator(c in coeffs()) {
        // I(0) = 0, so M⁻(φ) ≤ I(φ) ≤ M⁺(φ) for operators with the same (λ, Λ).
        let f = ellipse();
        let u = data(&f.bgrid, &c);
        let lo = extremal_operator(Extremal::Minus, 1.0, 2.0, &f.grid, &f.bgrid).unwrap().evaluate(&u).unwrap();
        let hi = extremal_operator(Extremal::Plus, 1.0, 2.0, &f.grid, &f.bgrid).unwrap().evaluate(&u).unwrap();
        let tol = 10.0 * f.grid.h();
        for spec in [holder_spec(), OperatorSpec::pucci(OperatorKind::BellmanMax, 1.0, 2.0)] {
            let mid = DtnOperator::new(&spec, &f.grid, &f.bgrid).unwrap().evaluate(&u).unwrap();
            for i in 0..NB {
                prop_assert!(lo[i] <= mid[i] + tol && mid[i] <= hi[i] + tol);
            }
        }
    }

    #[test]
    fn comparison_holds_for_touching_pairs(seed in 0u64..1000) {
        let f = ellipse();
        for spec in [holder_spec(), OperatorSpec::pucci(OperatorKind::BellmanMin, 1.0, 2.0)] {
            let op = DtnOperator::new(&spec, &f.grid, &f.bgrid).unwrap();
            let rep = check_gcp(&op, 3, seed).unwrap();
            prop_assert!(rep.max_violation <= 10.0 * f.grid.h());
        }
    }
}

#[test]
fn identical_pairs_have_no_violation() {
    let f = ellipse();
    let op = DtnOperator::new(&holder_spec(), &f.grid, &f.bgrid).unwrap();
    let u = data(&f.bgrid, &[0.3, -0.2, 0.5, 0.1]);
    let a = op.evaluate(&u).unwrap();
    let b = op.evaluate(&u).unwrap();
    assert_eq!(a, b);
}

#[test]
fn disk_matrix_is_the_fourier_multiplier() {
    let c = BoundaryCurve::unit_disk();
    let grid = DomainGrid::build(&c, 1.0 / 64.0).unwrap();
    let bgrid = c.build_boundary_grid(128).unwrap();
    let m = DtnOperator::new(&OperatorSpec::laplacian(), &grid, &bgrid)
        .unwrap()
        .assemble_matrix()
        .unwrap();
    for k in 1..=5 {
        let phi = bgrid.sample(|s| (k as f64 * s).cos());
        let out = m.apply(&phi);
        let err = out
            .iter()
            .zip(&phi)
            .map(|(o, p)| (o + k as f64 * p).abs())
            .fold(0.0, f64::max);
        assert!(err <= 0.05 * k as f64, "mode {k}: {err}");
    }
}

#[test]
fn matrix_rows_sum_to_zero_and_off_diagonals_are_nonnegative() {
    let f = ellipse();
    let field = CoefficientField::holder(1.0, 2.0, 0.5, [0.3, 0.2], 2.0, [0.0, 1.0]);
    for spec in [
        holder_spec(),
        OperatorSpec::divergence(field, 1.0, 2.0, "div"),
    ] {
        let m: DtNMatrix = DtnOperator::new(&spec, &f.grid, &f.bgrid)
            .unwrap()
            .assemble_matrix()
            .unwrap();
        assert!(m.row_sums().iter().all(|s| s.abs() < 1e-8));
        assert!(m.min_off_diagonal() >= -1e-10);
    }
}

#[test]
fn degenerate_extremal_maps_equal_the_laplacian() {
    let f = ellipse();
    let u = data(&f.bgrid, &[0.4, 0.1, -0.3, 0.2]);
    let lap = DtnOperator::new(&OperatorSpec::laplacian(), &f.grid, &f.bgrid)
        .unwrap()
        .evaluate(&u)
        .unwrap();
    for sign in [Extremal::Minus, Extremal::Plus] {
        let e = extremal_operator(sign, 1.0, 1.0, &f.grid, &f.bgrid)
            .unwrap()
            .evaluate(&u)
            .unwrap();
        assert!(e.iter().zip(&lap).all(|(a, b)| (a - b).abs() < 1e-9));
    }
}

#[test]
fn frozen_policy_matrices_bound_the_bellman_min_map() {
    let f = ellipse();
    let spec = OperatorSpec::bellman(
        OperatorKind::BellmanMin,
        vec![
            CoefficientField::Constant { a1: 1.0, a2: 2.0 },
            CoefficientField::Constant { a1: 2.0, a2: 1.0 },
        ],
        1.0,
        2.0,
        "toy",
    );
    let op = DtnOperator::new(&spec, &f.grid, &f.bgrid).unwrap();
    let phi = data(&f.bgrid, &[0.5, -0.4, 0.3, 0.2]);
    let value = op.evaluate(&phi).unwrap();
    let (frozen, _) = op.frozen_policy_matrix(&phi).unwrap();
    let at = frozen.apply(&phi);
    let tol = 10.0 * f.grid.h();
    assert!(value.iter().zip(&at).all(|(a, b)| (a - b).abs() <= tol));
    for k in 0..2 {
        let single = op
            .policy_matrix(&vec![k; f.grid.len()])
            .unwrap()
            .apply(&phi);
        assert!(value.iter().zip(&single).all(|(a, b)| *a <= b + tol));
    }
}

#[test]
fn single_control_frozen_matrix_equals_linear_assembly() {
    let f = ellipse();
    let field = CoefficientField::Constant { a1: 1.0, a2: 2.0 };
    let bell = OperatorSpec::bellman(
        OperatorKind::BellmanMax,
        vec![field.clone()],
        1.0,
        2.0,
        "one",
    );
    let lin = OperatorSpec::nondivergence(field, 1.0, 2.0, "one");
    let phi = data(&f.bgrid, &[0.2, 0.1, 0.0, -0.3]);
    let (a, _) = DtnOperator::new(&bell, &f.grid, &f.bgrid)
        .unwrap()
        .frozen_policy_matrix(&phi)
        .unwrap();
    let b = DtnOperator::new(&lin, &f.grid, &f.bgrid)
        .unwrap()
        .assemble_matrix()
        .unwrap();
    for i in 0..NB {
        for j in 0..NB {
            assert!((a.get(i, j) - b.get(i, j)).abs() < 1e-10);
        }
    }
}
