//! Green-function and harmonic-measure checks for linear operators.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{max_of, min_of, CheckRecord};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryCurve, BoundaryGrid, Point};
use crate::operator::OperatorKind;
use crate::solver::{smoothed_indicator, EllipticSolver};

/// Spread allowed between the extreme ratios of a "bounded above and below" check.
pub const RATIO_SPREAD: f64 = 10.0;

/// Euclidean distance from `p` to the curve, by dense sampling.
pub fn boundary_distance(curve: &BoundaryCurve, p: Point) -> f64 {
    let n = 4096;
    min_of((0..n).map(|k| {
        let q = curve.point_at_parameter(k as f64 / n as f64);
        (p[0] - q[0]).hypot(p[1] - q[1])
    }))
}

/// Green function of `-Δ` on the unit disk: `(1/2π) log(|1 − x ȳ| / |x − y|)`.
pub fn disk_green(x: Point, y: Point) -> f64 {
    let re = 1.0 - (x[0] * y[0] + x[1] * y[1]);
    let im = -(x[1] * y[0] - x[0] * y[1]);
    (re.hypot(im) / (x[0] - y[0]).hypot(x[1] - y[1])).ln() / (2.0 * PI)
}

pub struct GreenSetup<'a, 'g> {
    pub solver: &'a EllipticSolver<'g>,
    pub curve: &'a BoundaryCurve,
    pub bgrid: &'a BoundaryGrid,
    /// Compare against the exact unit-disk Green function.
    pub unit_disk: bool,
    pub pairs: usize,
    pub rhos: Vec<f64>,
    pub s0: f64,
    pub seed: u64,
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

pub fn verify_green_suite(setup: &GreenSetup) -> Result<Vec<CheckRecord>> {
    let solver = setup.solver;
    if !solver.kind().is_linear() {
        return Err(Error::Input("Green suite needs a linear operator".into()));
    }
    let grid = solver.grid();
    let h = grid.h();
    let label = solver.operator().label.clone();
    let prov = format!("{} h={:.6e} nodes={}", label, h, grid.len());
    let depth: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|n| boundary_distance(setup.curve, n.pos))
        .collect();
    let mut out = Vec::new();

    if setup.unit_disk {
        let mut worst: f64 = 0.0;
        let mut count = 0;
        for y in [[0.0, 0.0], [0.3, 0.2], [-0.5, 0.1]] {
            let src = grid
                .nearest_node(y)
                .ok_or_else(|| Error::Input("source outside the disk".into()))?;
            let ypos = grid.node(src).pos;
            let g = solver.green(src)?;
            for (n, node) in grid.nodes().iter().enumerate() {
                if dist(node.pos, ypos) >= 0.1 && depth[n] >= 0.1 {
                    let exact = disk_green(node.pos, ypos);
                    worst = worst.max((g[n] / exact - 1.0).abs());
                    count += 1;
                }
            }
        }
        out.push(
            CheckRecord::new(
                "green_disk_exact",
                "method-of-images Green function on the disk",
            )
            .value("max_rel_error", worst)
            .tol("max_rel_error", 0.05)
            .samples(count)
            .grid(prov.clone())
            .verdict(worst <= 0.05),
        );
    }

    // G |x−y|² / (d(x) d(y)) over seeded pairs in the regime |x−y|² ≥ d(x)d(y).
    let mut rng = ChaCha8Rng::seed_from_u64(setup.seed);
    let mut ratios = Vec::new();
    let mut draws = 0;
    while ratios.len() < setup.pairs {
        draws += 1;
        if draws > 1_000_000 {
            return Err(Error::Resolution(
                "too few admissible interior pairs for the Green ratio".into(),
            ));
        }
        let (a, b) = (rng.gen_range(0..grid.len()), rng.gen_range(0..grid.len()));
        let (pa, pb) = (grid.node(a).pos, grid.node(b).pos);
        let r = dist(pa, pb);
        if depth[a] < 3.0 * h || depth[b] < 3.0 * h || r < 4.0 * h || r * r < depth[a] * depth[b] {
            continue;
        }
        let g = solver.green(b)?;
        ratios.push(g[a] * r * r / (depth[a] * depth[b]));
    }
    let (lo, hi) = (
        min_of(ratios.iter().copied()),
        max_of(ratios.iter().copied()),
    );
    out.push(
        CheckRecord::new(
            &format!("green_ratio/{label}"),
            "two-sided Green bound d(x)d(y)/|x-y|^2",
        )
        .value("ratio_min", lo)
        .value("ratio_max", hi)
        .value("regime", "|x-y|^2 >= d(x)d(y), d >= 3h")
        .tol("ratio_min_exclusive", 0.0)
        .tol("max_over_min", RATIO_SPREAD)
        .samples(ratios.len())
        .grid(prov.clone())
        .verdict(lo > 0.0 && hi / lo <= RATIO_SPREAD),
    );

    out.push(harmonic_measure_ratio(setup, &depth, &prov)?);
    Ok(out)
}

/// Half-lengths `(ℓ₋, ℓ₊)` of the boundary arc inside the chord ball `B_ρ(x(s))`.
fn chord_arc(curve: &BoundaryCurve, s: f64, rho: f64) -> Result<(f64, f64)> {
    let (x, _) = curve.point_and_normal(s)?;
    let mut ends = [0.0; 2];
    for (k, sign) in [-1.0, 1.0].into_iter().enumerate() {
        let (mut a, mut b) = (0.0, 0.5 * curve.perimeter());
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            let (p, _) = curve.point_and_normal(s + sign * m)?;
            if dist(p, x) < rho {
                a = m;
            } else {
                b = m;
            }
        }
        ends[k] = a;
    }
    Ok((ends[0], ends[1]))
}

/// `ω_y(∂Ω ∩ B_ρ(x)) / G(y, x + ρν(x))` over `ρ` and `y ∉ B_{s₀ρ}(x)`. For
/// non-divergence operators the Green value is replaced by its average
/// `ρ⁻² ∫_{B_{ρ/2}(x+ρν)} G(y, z) dz`.
fn harmonic_measure_ratio(setup: &GreenSetup, depth: &[f64], prov: &str) -> Result<CheckRecord> {
    let solver = setup.solver;
    let grid = solver.grid();
    let h = grid.h();
    let integrated = solver.kind() == OperatorKind::Nondivergence;
    let sys = solver.linear_system().expect("linear operator");
    let bases = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(setup.seed ^ 0x5eed);
    let deep: Vec<usize> = (0..grid.len())
        .filter(|&n| depth[n] >= 0.15 * depth.iter().cloned().fold(0.0, f64::max))
        .collect();
    if deep.is_empty() {
        return Err(Error::Resolution("no interior observation points".into()));
    }
    let ys: Vec<usize> = (0..8).map(|_| deep[rng.gen_range(0..deep.len())]).collect();
    let mut near = Vec::new();
    let mut far = Vec::new();
    for k in 0..bases {
        let s = setup.curve.perimeter() * (k as f64 + 0.25) / bases as f64;
        let (x, nu) = setup.curve.point_and_normal(s)?;
        for &rho in &setup.rhos {
            let (lm, lp) = chord_arc(setup.curve, s, rho)?;
            let phi = smoothed_indicator(setup.bgrid, &[(s - lm, s + lp)]);
            let omega = solver.solve_nodal(setup.bgrid, &phi)?.values;
            let green = if integrated {
                let centre = [x[0] + rho * nu[0], x[1] + rho * nu[1]];
                let rhs: Vec<f64> = grid
                    .nodes()
                    .iter()
                    .map(|n| {
                        if dist(n.pos, centre) < 0.5 * rho {
                            -1.0 / (rho * rho)
                        } else {
                            0.0
                        }
                    })
                    .collect();
                if rhs.iter().all(|&v| v == 0.0) {
                    return Err(Error::Resolution(format!(
                        "averaging ball at rho = {rho} holds no nodes"
                    )));
                }
                sys.solve_rhs(&rhs).0
            } else {
                let z = [x[0] + rho * nu[0], x[1] + rho * nu[1]];
                solver.green_at_point(z)?
            };
            for &y in &ys {
                let r = dist(grid.node(y).pos, x);
                let ratio = omega[y] / green[y];
                if r >= setup.s0 * rho {
                    near.push(ratio);
                }
                if r >= 2.0 * setup.s0 * rho {
                    far.push(ratio);
                }
            }
        }
    }
    if near.is_empty() {
        return Err(Error::Resolution(
            "no observation points outside B_{s0 rho}(x)".into(),
        ));
    }
    let (lo, hi) = (min_of(near.iter().copied()), max_of(near.iter().copied()));
    let far_spread = if far.is_empty() {
        f64::NAN
    } else {
        max_of(far.iter().copied()) / min_of(far.iter().copied())
    };
    Ok(CheckRecord::new(
        &format!("harmonic_measure_green/{}", solver.operator().label),
        "harmonic measure comparable to rho^(n-1) G(y, x + rho nu)",
    )
    .value("ratio_min", lo)
    .value("ratio_max", hi)
    .value("rho", &setup.rhos)
    .value("s0", setup.s0)
    .value("spread_at_2s0", far_spread)
    .value("integrated_green", integrated)
    .tol("ratio_min_exclusive", 0.0)
    .tol("max_over_min", RATIO_SPREAD)
    .samples(near.len())
    .grid(format!("{prov} h={h:.6e} nb={}", setup.bgrid.len()))
    .verdict(lo > 0.0 && hi / lo <= RATIO_SPREAD))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_green_matches_logarithm_at_centre() {
        let g = disk_green([0.5, 0.0], [0.0, 0.0]);
        assert!((g + 0.5f64.ln() / (2.0 * PI)).abs() < 1e-15);
        assert!(
            (disk_green([0.2, 0.3], [-0.4, 0.1]) - disk_green([-0.4, 0.1], [0.2, 0.3])).abs()
                < 1e-15
        );
        assert!(disk_green([1.0, 0.0], [0.3, 0.1]).abs() < 1e-15);
    }

    #[test]
    fn distance_to_unit_circle() {
        let c = BoundaryCurve::unit_disk();
        assert!((boundary_distance(&c, [0.2, 0.1]) - (1.0 - 0.2f64.hypot(0.1))).abs() < 1e-6);
    }
}
