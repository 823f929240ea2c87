//! Comparison properties, min-max structure and bump-function mass laws.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{fit_power_law, max_of, min_of, CheckRecord};
use crate::dtn::{check_gcp, extremal_operator, random_smooth, DtnOperator, Extremal};
use crate::error::{Error, Result};
use crate::geometry::BoundaryCurve;
use crate::levy::{bump_mass, Profile, Region, Side};
use crate::quadrature::GaussLegendre;

fn provenance(op: &DtnOperator) -> String {
    format!(
        "{} h={:.6e} nb={}",
        op.label(),
        op.grid().h(),
        op.boundary_grid().len()
    )
}

/// Global comparison on seeded touching pairs; violations up to `10 h` allowed.
pub fn verify_gcp(op: &DtnOperator, trials: usize, seed: u64) -> Result<CheckRecord> {
    let rep = check_gcp(op, trials, seed)?;
    let tol = 10.0 * op.grid().h();
    Ok(
        CheckRecord::new(&format!("gcp/{}", op.label()), "global comparison property")
            .value("max_violation", rep.max_violation)
            .value("worst_node", rep.worst_node)
            .value("seed", seed)
            .tol("max_violation", tol)
            .samples(trials)
            .grid(provenance(op))
            .verdict(rep.max_violation <= tol),
    )
}

/// `M⁻(u − v) ≤ I(u) − I(v) ≤ M⁺(u − v)` at every node for seeded pairs.
pub fn verify_sandwich(
    op: &DtnOperator,
    lambda: f64,
    upper: f64,
    pairs: usize,
    seed: u64,
) -> Result<CheckRecord> {
    let grid = op.grid();
    let bgrid = op.boundary_grid();
    let minus = extremal_operator(Extremal::Minus, lambda, upper, grid, bgrid)?;
    let plus = extremal_operator(Extremal::Plus, lambda, upper, grid, bgrid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut worst_at = None;
    for trial in 0..pairs {
        let u = random_smooth(bgrid, &mut rng, 5);
        let v = random_smooth(bgrid, &mut rng, 5);
        let diff: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a - b).collect();
        let (iu, iv) = (op.evaluate(&u)?, op.evaluate(&v)?);
        let (lo, hi) = (minus.evaluate(&diff)?, plus.evaluate(&diff)?);
        for i in 0..bgrid.len() {
            let d = iu[i] - iv[i];
            let viol = (lo[i] - d).max(d - hi[i]);
            if viol > worst {
                worst = viol;
                worst_at = Some((trial, i));
            }
        }
    }
    let tol = 10.0 * grid.h();
    Ok(CheckRecord::new(
        &format!("sandwich/{}", op.label()),
        "extremal bounds M- <= I(u)-I(v) <= M+",
    )
    .value("max_violation", worst)
    .value("lambda", lambda)
    .value("Lambda", upper)
    .value("seed", seed)
    .tol("max_violation", tol)
    .samples(pairs * bgrid.len())
    .grid(provenance(op))
    .worst(worst_at.map(|(t, i)| serde_json::json!({ "pair": t, "node": i })))
    .verdict(worst <= tol))
}

/// Min-max structure of a Bellman-min map: `I(φ) ≤ L^{a'} φ` for frozen
/// policies `a'`, with equality at the converged policy.
pub fn verify_minmax(
    op: &DtnOperator,
    tests: usize,
    policies: usize,
    seed: u64,
) -> Result<CheckRecord> {
    if op.kind() != crate::operator::OperatorKind::BellmanMin {
        return Err(Error::Input(
            "min-max check expects a Bellman-min operator".into(),
        ));
    }
    let controls = op.solver().operator().num_controls();
    let nodes = op.grid().len();
    let bgrid = op.boundary_grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut above: f64 = 0.0;
    let mut gap: f64 = 0.0;
    for _ in 0..tests {
        let phi = random_smooth(bgrid, &mut rng, 5);
        let sol = op.solve(&phi)?;
        let value = op.evaluate(&phi)?;
        let best = sol.policy.clone().expect("Bellman solve returns a policy");
        let at_best = op.evaluate_with_policy(&best, &phi)?;
        gap = gap.max(max_of(
            value.iter().zip(&at_best).map(|(a, b)| (a - b).abs()),
        ));
        for _ in 0..policies {
            let policy: Vec<usize> = (0..nodes).map(|_| rng.gen_range(0..controls)).collect();
            let frozen = op.evaluate_with_policy(&policy, &phi)?;
            above = above.max(max_of(value.iter().zip(&frozen).map(|(a, b)| a - b)));
        }
    }
    let tol = 10.0 * op.grid().h();
    Ok(CheckRecord::new(
        &format!("minmax/{}", op.label()),
        "min-max representation over linear D-to-N maps",
    )
    .value("max_excess_over_frozen", above)
    .value("gap_at_converged_policy", gap)
    .value("controls", controls)
    .value("seed", seed)
    .tol("max_excess_over_frozen", tol)
    .tol("gap_at_converged_policy", tol)
    .samples(tests * policies)
    .grid(provenance(op))
    .verdict(above <= tol && gap <= tol))
}

/// Ring masses on extremal maps: lower bumps through `M⁻`, upper bumps
/// through `M⁺`, each fitted against `r` (expected slope `−1`).
pub fn verify_ring_law(
    minus: &DtnOperator,
    plus: &DtnOperator,
    bases: &[usize],
    radii: &[f64],
) -> Result<CheckRecord> {
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for &x in bases {
        for &r in radii {
            let region = Region::Ring { radius: r };
            lower.push((r, bump_mass(minus, x, region, Side::Lower)?));
            upper.push((r, bump_mass(plus, x, region, Side::Upper)?));
        }
    }
    let ordered = lower.iter().zip(&upper).all(|(l, u)| l.1 <= u.1);
    let positive = lower.iter().all(|s| s.1 > 0.0);
    let mut rec = CheckRecord::new(
        &format!("ring_law/{}", minus.label()),
        "ring mass C1/r <= mu(x, B_2r \\ B_r) <= C2/r",
    )
    .value("radii", radii)
    .value(
        "lower_masses",
        lower.iter().map(|s| s.1).collect::<Vec<_>>(),
    )
    .value(
        "upper_masses",
        upper.iter().map(|s| s.1).collect::<Vec<_>>(),
    )
    .value("lower_below_upper", ordered)
    .tol("slope", [-1.2, -0.8])
    .samples(lower.len() + upper.len())
    .grid(format!("{}; {}", provenance(minus), provenance(plus)));
    if !positive {
        return Ok(rec.worst(min_of(lower.iter().map(|s| s.1))).verdict(false));
    }
    let (fl, fu) = (fit_power_law(&lower)?, fit_power_law(&upper)?);
    let ok = |s: f64| (s + 1.0).abs() <= 0.2;
    let pass = ok(fl.slope) && ok(fu.slope) && ordered;
    rec = rec
        .value("lower_slope", fl.slope)
        .value("upper_slope", fu.slope);
    Ok(rec.verdict(pass))
}

/// `∫ f(|x − h|) K(x, h) dh` on the unit circle for a chord-distance profile.
pub fn disk_bump_integral(profile: &Profile) -> f64 {
    let gl = GaussLegendre::new(16);
    let to_angle = |c: f64| 2.0 * (0.5 * c.clamp(0.0, 2.0)).asin();
    let a = if profile.support.0.is_finite() {
        to_angle(profile.support.0)
    } else {
        0.0
    };
    let b = to_angle(profile.support.1);
    let integrand =
        |t: f64| profile.eval(2.0 * (0.5 * t).sin()) / (4.0 * PI * (0.5 * t).sin().powi(2));
    2.0 * gl.integrate_composite(a.max(1e-300), b.min(PI), 64, integrand)
}

/// With `λ = Λ` the extremal maps reduce to the Laplacian; bump masses on the
/// unit disk must match the analytic integral of the same bump within 10%.
pub fn verify_degenerate_ring(
    op: &DtnOperator,
    bases: &[usize],
    radii: &[f64],
) -> Result<CheckRecord> {
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for &x in bases {
        for &r in radii {
            let region = Region::Ring { radius: r };
            for side in [Side::Lower, Side::Upper] {
                let mass = bump_mass(op, x, region, side)?;
                let exact = disk_bump_integral(&region.profile(side));
                let e = (mass / exact - 1.0).abs();
                worst = worst.max(e);
                rows.push([r, mass, exact]);
            }
        }
    }
    Ok(
        CheckRecord::new("ring_degenerate_disk", "ring mass of the circle kernel")
            .value("max_rel_error", worst)
            .value("radius_mass_exact", &rows)
            .tol("max_rel_error", 0.1)
            .samples(rows.len())
            .grid(provenance(op))
            .verdict(worst <= 0.1),
    )
}

/// Lower-bump ball masses `μ(x, B_r(y))` through `M⁻` for `r < d(x,y)/10`:
/// all positive, and the exponent `η̂` of mass against `r` at least 1.
pub fn verify_ball_positivity(
    minus: &DtnOperator,
    pairs: &[(usize, usize)],
    fractions: &[f64],
) -> Result<CheckRecord> {
    if fractions.iter().any(|&f| !(f > 0.0 && f < 0.1)) {
        return Err(Error::Precondition(
            "ball radii must satisfy r < d(x, y)/10".into(),
        ));
    }
    let bgrid = minus.boundary_grid();
    let mut masses = Vec::new();
    let mut etas = Vec::new();
    let mut all_positive = true;
    for &(x, y) in pairs {
        let d = bgrid.distance(x, y);
        let mut samples = Vec::new();
        for &f in fractions {
            let r = f * d;
            let m = bump_mass(
                minus,
                x,
                Region::Ball {
                    center: y,
                    radius: r,
                },
                Side::Lower,
            )?;
            all_positive &= m > 0.0;
            masses.push(m);
            samples.push((r, m));
        }
        if all_positive {
            etas.push(fit_power_law(&samples)?.slope);
        }
    }
    let eta_min = min_of(etas.iter().copied());
    let pass = all_positive && eta_min >= 1.0;
    Ok(CheckRecord::new(
        &format!("ball_positivity/{}", minus.label()),
        "lower bound C1 r^eta / d^(eta+1) <= mu(x, B_r(h))",
    )
    .value("min_mass", min_of(masses.iter().copied()))
    .value("eta_hat", &etas)
    .value("eta_hat_min", eta_min)
    .value("fractions", fractions)
    .tol("mass_min_exclusive", 0.0)
    .tol("eta_hat_min", 1.0)
    .samples(masses.len())
    .grid(provenance(minus))
    .verdict(pass))
}

/// Geodesic/chord ratio ≤ 9/8 for radii below the computed threshold.
pub fn verify_annuli(
    curves: &[(&str, &BoundaryCurve)],
    fractions: &[f64],
    bases: usize,
) -> Result<CheckRecord> {
    let mut worst: f64 = 1.0;
    let mut eps = Vec::new();
    let mut count = 0;
    let mut pass = true;
    for (name, c) in curves {
        let e0 = c.annuli_threshold();
        eps.push(serde_json::json!({ "curve": name, "eps0": e0 }));
        for k in 0..bases {
            let s = c.perimeter() * k as f64 / bases as f64;
            for &f in fractions {
                let rep = c.annuli_inclusion_check(s, f * e0)?;
                worst = worst.max(rep.max_ratio);
                pass &= rep.pass;
                count += 1;
            }
        }
    }
    Ok(CheckRecord::new(
        "annuli_inclusion",
        "geodesic annuli inside chord annuli below eps0",
    )
    .value("max_ratio", worst)
    .value("eps0", eps)
    .value("fractions", fractions)
    .tol("max_ratio", 9.0 / 8.0)
    .samples(count)
    .grid("curve sampling, 400 points per side")
    .verdict(pass && worst <= 9.0 / 8.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::Region;

    #[test]
    fn disk_ring_integral_scales_like_inverse_radius() {
        // Indicator limit: 2∫_r^{2r} ds/(4π sin²(s/2)) = (cot(r/2) − cot r)/π.
        let r: f64 = 0.1;
        let exact = ((0.5 * r).tan().recip() - r.tan().recip()) / PI;
        let lo = disk_bump_integral(&Region::Ring { radius: r }.profile(Side::Lower));
        let hi = disk_bump_integral(&Region::Ring { radius: r }.profile(Side::Upper));
        assert!(lo < exact && exact < hi);
        // Chord and arc nearly agree at this scale, so the bumps bracket 1/(π r)-ish mass.
        assert!((exact * PI * r - 1.0).abs() < 0.01);
    }
}
