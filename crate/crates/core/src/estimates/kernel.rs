//! Checks on extracted kernels and drifts of linear D-to-N matrices.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{fit_power_law, max_of, min_of, CheckRecord};
use crate::dtn::{random_smooth, DtNMatrix};
use crate::error::{Error, Result};
use crate::levy::{smooth_step, LevyDecomposition};

fn provenance(dec: &LevyDecomposition) -> String {
    format!("{} h={:.6e} nb={}", dec.label, dec.h, dec.len())
}

/// Unit-circle kernel `1/(4π sin²(Δθ/2))`.
pub fn disk_kernel(dtheta: f64) -> f64 {
    1.0 / (4.0 * PI * (0.5 * dtheta).sin().powi(2))
}

/// Exclusion radius for near-diagonal entries.
fn near_band(dec: &LevyDecomposition) -> f64 {
    3.0 * dec.h.max(dec.boundary_grid().spacing())
}

/// `(d, K)` over all pairs with `lo ≤ d ≤ hi`.
fn kernel_samples(dec: &LevyDecomposition, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let b = dec.boundary_grid();
    let mut out = Vec::new();
    for i in 0..dec.len() {
        for j in 0..dec.len() {
            let d = b.distance(i, j);
            if i != j && d >= lo && d <= hi {
                out.push((d, dec.kernel(i, j).unwrap_or(0.0)));
            }
        }
    }
    out
}

/// Exponent of `K` against `d` on `3h ≤ d ≤ P/4` and the constants
/// `c₁ = min K d²`, `c₂ = max K d²`.
pub fn verify_kernel_bounds(dec: &LevyDecomposition) -> Result<CheckRecord> {
    let (lo, hi) = (near_band(dec), 0.25 * dec.boundary_grid().perimeter());
    let samples = kernel_samples(dec, lo, hi);
    let positive: Vec<(f64, f64)> = samples.iter().copied().filter(|s| s.1 > 0.0).collect();
    if positive.len() < 4 {
        return Err(Error::Resolution(format!(
            "only {} node pairs in the window [{lo}, {hi}]",
            positive.len()
        )));
    }
    let fit = fit_power_law(&positive)?;
    let kd2 = |s: &(f64, f64)| s.1 * s.0 * s.0;
    let c1 = min_of(samples.iter().map(kd2));
    let c2 = max_of(samples.iter().map(kd2));
    let worst = samples
        .iter()
        .min_by(|a, b| kd2(a).total_cmp(&kd2(b)))
        .copied();
    let pass = (fit.slope + 2.0).abs() <= 0.2 && c1 > 0.0;
    Ok(CheckRecord::new(
        &format!("kernel_bounds/{}", dec.label),
        "two-sided kernel bound c1 d^-2 <= K <= c2 d^-2",
    )
    .value("slope", fit.slope)
    .value("fit_residual", fit.residual)
    .value("c1", c1)
    .value("c2", c2)
    .value("window", [lo, hi])
    .tol("slope", [-2.2, -1.8])
    .tol("c1_min_exclusive", 0.0)
    .samples(samples.len())
    .grid(provenance(dec))
    .worst(worst.map(|(d, k)| serde_json::json!({ "d": d, "K": k })))
    .verdict(pass))
}

/// Kernel bounds on successive refinements with `c₁` stable within a factor 2.
pub fn verify_kernel_stability(decs: &[&LevyDecomposition]) -> Result<CheckRecord> {
    if decs.len() < 2 {
        return Err(Error::Input(
            "stability check needs at least two grids".into(),
        ));
    }
    let recs: Vec<CheckRecord> = decs
        .iter()
        .map(|d| verify_kernel_bounds(d))
        .collect::<Result<_>>()?;
    let get = |r: &CheckRecord, k: &str| r.values[k].as_f64().unwrap_or(f64::NAN);
    let slopes: Vec<f64> = recs.iter().map(|r| get(r, "slope")).collect();
    let c1: Vec<f64> = recs.iter().map(|r| get(r, "c1")).collect();
    let c2: Vec<f64> = recs.iter().map(|r| get(r, "c2")).collect();
    let ratio = max_of(c1.windows(2).map(|w| (w[0] / w[1]).max(w[1] / w[0])));
    let pass = recs.iter().all(|r| r.pass) && ratio <= 2.0;
    Ok(CheckRecord::new(
        &format!("kernel_stability/{}", decs[0].label),
        "two-sided kernel bound stable under refinement",
    )
    .value("slopes", &slopes)
    .value("c1", &c1)
    .value("c2", &c2)
    .value("c1_ratio", ratio)
    .value("h", decs.iter().map(|d| d.h).collect::<Vec<_>>())
    .tol("slope", [-2.2, -1.8])
    .tol("c1_ratio_max", 2.0)
    .samples(recs.iter().map(|r| r.samples).sum())
    .grid(
        decs.iter()
            .map(|d| provenance(d))
            .collect::<Vec<_>>()
            .join("; "),
    )
    .verdict(pass))
}

/// Max relative error against the unit-circle kernel for `Δθ ∈ [0.3, π]`.
fn disk_error(dec: &LevyDecomposition) -> (f64, f64, usize) {
    let samples = kernel_samples(dec, 0.3, PI);
    let mut worst = (0.0, 0.0);
    for &(d, k) in &samples {
        let e = (k / disk_kernel(d) - 1.0).abs();
        if e > worst.0 {
            worst = (e, d);
        }
    }
    (worst.0, worst.1, samples.len())
}

/// Unit-disk Laplacian kernel against the circle oracle on a refinement
/// sequence (coarse to fine).
pub fn verify_disk_oracle(decs: &[&LevyDecomposition]) -> Result<CheckRecord> {
    let errs: Vec<(f64, f64, usize)> = decs.iter().map(|d| disk_error(d)).collect();
    if errs.iter().any(|e| e.2 == 0) {
        return Err(Error::Resolution(
            "no node pairs with separation in [0.3, pi]".into(),
        ));
    }
    let max_err: Vec<f64> = errs.iter().map(|e| e.0).collect();
    let finest = *max_err.last().unwrap();
    let decreasing = max_err.windows(2).all(|w| w[1] <= w[0]);
    let at = errs.last().unwrap().1;
    Ok(CheckRecord::new(
        "disk_kernel_oracle",
        "half-Laplacian on the circle: K = 1/(4 pi sin^2(dtheta/2))",
    )
    .value("max_rel_error", &max_err)
    .value("h", decs.iter().map(|d| d.h).collect::<Vec<_>>())
    .value("worst_dtheta", at)
    .tol("max_rel_error", 0.1)
    .tol("refinement", "max error non-increasing")
    .samples(errs.iter().map(|e| e.2).sum())
    .grid(
        decs.iter()
            .map(|d| provenance(d))
            .collect::<Vec<_>>()
            .join("; "),
    )
    .worst(serde_json::json!({ "dtheta": at, "rel_error": finest }))
    .verdict(finest <= 0.1 && decreasing))
}

/// Mean kernel over all node pairs at separation closest to `s`.
fn kernel_at(dec: &LevyDecomposition, s: f64) -> (f64, f64) {
    let b = dec.boundary_grid();
    let k = ((s / b.spacing()).round() as usize).max(1);
    let mean = (0..dec.len())
        .map(|i| dec.kernel(i, (i + k) % dec.len()).unwrap_or(0.0))
        .sum::<f64>()
        / dec.len() as f64;
    (mean, b.distance(0, k))
}

/// Strip kernel against the half-plane value `1/(π s²)`, after confirming
/// that two strip heights agree within 2%.
pub fn verify_strip_oracle(
    short: &LevyDecomposition,
    tall: &LevyDecomposition,
    s: f64,
) -> Result<CheckRecord> {
    let (ks, ds) = kernel_at(short, s);
    let (kt, dt) = kernel_at(tall, s);
    if (ds - dt).abs() > 1e-9 * s {
        return Err(Error::Input(
            "strip grids must share the boundary spacing".into(),
        ));
    }
    let height_gap = (ks / kt - 1.0).abs();
    let oracle = 1.0 / (PI * dt * dt);
    let err = (kt / oracle - 1.0).abs();
    let pass = height_gap <= 0.02 && err <= 0.1;
    Ok(CheckRecord::new(
        "strip_half_plane_kernel",
        "flat boundary: I = -(-Delta)^(1/2), K = 1/(pi s^2)",
    )
    .value("s", dt)
    .value("kernel_short", ks)
    .value("kernel_tall", kt)
    .value("oracle", oracle)
    .value("height_disagreement", height_gap)
    .value("rel_error", err)
    .tol("height_disagreement", 0.02)
    .tol("rel_error", 0.1)
    .samples(short.len() + tall.len())
    .grid(format!("{}; {}", provenance(short), provenance(tall)))
    .verdict(pass))
}

fn max_drift(dec: &LevyDecomposition) -> f64 {
    max_of(dec.drift().iter().map(|b| b.abs()))
}

/// Drift of a symmetric domain: `max |b| ≤ bound` and halving per refinement.
pub fn verify_drift_halving(decs: &[&LevyDecomposition], bound: f64) -> Result<CheckRecord> {
    if decs.len() < 2 {
        return Err(Error::Input(
            "drift refinement needs at least two grids".into(),
        ));
    }
    let b: Vec<f64> = decs.iter().map(|d| max_drift(d)).collect();
    let ratios: Vec<f64> = b.windows(2).map(|w| w[1] / w[0]).collect();
    let pass = b.iter().all(|&v| v <= bound) && ratios.iter().all(|&r| r <= 0.5);
    Ok(CheckRecord::new(
        &format!("drift_halving/{}", decs[0].label),
        "drift vanishes by symmetry and is bounded",
    )
    .value("max_abs_drift", &b)
    .value("refinement_ratio", &ratios)
    .value("h", decs.iter().map(|d| d.h).collect::<Vec<_>>())
    .tol("max_abs_drift", bound)
    .tol("refinement_ratio_max", 0.5)
    .samples(decs.iter().map(|d| d.len()).sum())
    .grid(
        decs.iter()
            .map(|d| provenance(d))
            .collect::<Vec<_>>()
            .join("; "),
    )
    .verdict(pass))
}

/// Drift bounded uniformly across refinements: every `max |b|` stays within
/// twice the coarsest one.
pub fn verify_drift_bounded(decs: &[&LevyDecomposition]) -> Result<CheckRecord> {
    if decs.len() < 3 {
        return Err(Error::Input(
            "uniform drift bound needs a grid and two refinements".into(),
        ));
    }
    let b: Vec<f64> = decs.iter().map(|d| max_drift(d)).collect();
    let growth = max_of(b.iter().map(|v| v / b[0]));
    let pass = b.iter().all(|v| v.is_finite()) && growth <= 2.0;
    Ok(CheckRecord::new(
        &format!("drift_bounded/{}", decs[0].label),
        "drift is bounded",
    )
    .value("max_abs_drift", &b)
    .value("growth", growth)
    .value("h", decs.iter().map(|d| d.h).collect::<Vec<_>>())
    .tol("growth_max", 2.0)
    .samples(decs.iter().map(|d| d.len()).sum())
    .grid(
        decs.iter()
            .map(|d| provenance(d))
            .collect::<Vec<_>>()
            .join("; "),
    )
    .verdict(pass))
}

/// Representation identity on random smooth data, and the effect of
/// changing the truncation radius.
pub fn verify_representation(
    m: &DtNMatrix,
    dec: &LevyDecomposition,
    r0_alt: f64,
    trials: usize,
    seed: u64,
) -> Result<CheckRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = dec.boundary_grid();
    let alt = dec.with_r0(r0_alt)?;
    let norm = m.norm();
    let mut recon_err: f64 = 0.0;
    let mut alt_err: f64 = 0.0;
    for _ in 0..trials {
        let phi = random_smooth(b, &mut rng, 6);
        let scale = norm * max_of(phi.iter().map(|v| v.abs()));
        let direct = m.apply(&phi);
        for (x, y) in dec.reconstruct_action(&phi)?.iter().zip(&direct) {
            recon_err = recon_err.max((x - y).abs() / scale);
        }
        for (x, y) in alt.reconstruct_action(&phi)?.iter().zip(&direct) {
            alt_err = alt_err.max((x - y).abs() / scale);
        }
    }
    // Drift change predicted from the kernel alone.
    let cut = |r0: f64, ramp: f64, d: f64| smooth_step((r0 + ramp - d) / ramp);
    let mut drift_err: f64 = 0.0;
    let mut drift_scale: f64 = 0.0;
    for i in 0..dec.len() {
        let mut predicted = 0.0;
        for j in 0..dec.len() {
            if i == j {
                continue;
            }
            let d = b.distance(i, j);
            let w = cut(alt.r0(), alt.ramp(), d) - cut(dec.r0(), dec.ramp(), d);
            if w != 0.0 {
                predicted += m.get(i, j) * w * b.offset(i, j)?;
            }
        }
        let change = alt.drift()[i] - dec.drift()[i];
        drift_err = drift_err.max((change - predicted).abs());
        drift_scale = drift_scale.max(predicted.abs()).max(dec.drift()[i].abs());
    }
    let drift_rel = drift_err / (norm * b.perimeter()).max(drift_scale);
    let tol = 1e-12;
    let pass = recon_err <= tol && alt_err <= tol && drift_rel <= tol;
    Ok(CheckRecord::new(
        &format!("representation_identity/{}", dec.label),
        "integro-differential representation with compensator",
    )
    .value("reconstruction_rel_error", recon_err)
    .value("alt_r0_reconstruction_rel_error", alt_err)
    .value("drift_change_rel_error", drift_rel)
    .value("r0", [dec.r0(), alt.r0()])
    .tol("rel_error", tol)
    .samples(trials)
    .grid(provenance(dec))
    .verdict(pass))
}

/// Hölder modulus of the truncated measures in total variation: for each
/// `δ`, fits `TV(x₁, x₂) ≈ A_δ d^α` over pairs inside `B_{δ/4}(x₀)` and checks
/// `α > 0` and that `A_δ` scales like `δ⁻²` within a factor 4.
pub fn verify_tv_holder(
    dec: &LevyDecomposition,
    bases: &[usize],
    deltas: &[f64],
) -> Result<CheckRecord> {
    let b = dec.boundary_grid();
    let n = dec.len();
    let w = b.spacing();
    let mut alphas = Vec::new();
    let mut prefactors = Vec::new();
    let mut counts = Vec::new();
    for &delta in deltas {
        let mut samples = Vec::new();
        // Pairs x₀ - k, x₀ + k (+1) keep both points within δ/4 of x₀.
        let kmax = ((0.25 * delta) / w).floor() as usize;
        for &x0 in bases {
            for k in 0..=kmax {
                for extra in 0..2 {
                    let (k1, k2) = (k, k + extra);
                    if k1 + k2 == 0 || (k2 as f64) * w >= 0.25 * delta {
                        continue;
                    }
                    let x1 = (x0 + n - k1 % n) % n;
                    let x2 = (x0 + k2) % n;
                    samples.push((b.distance(x1, x2), dec.tv_distance(x1, x2, delta)?));
                }
            }
        }
        let fit = fit_power_law(&samples)?;
        alphas.push(fit.slope);
        prefactors.push(fit.prefactor());
        counts.push(samples.len());
    }
    // Prefactor ratio across each halving of δ (δ sorted ascending).
    let mut order: Vec<usize> = (0..deltas.len()).collect();
    order.sort_by(|&a, &b| deltas[a].total_cmp(&deltas[b]));
    let ratios: Vec<f64> = order
        .windows(2)
        .map(|p| prefactors[p[0]] / prefactors[p[1]])
        .collect();
    let pass = alphas.iter().all(|&a| a > 0.0) && ratios.iter().all(|&r| (1.0..=16.0).contains(&r));
    Ok(CheckRecord::new(
        &format!("tv_holder/{}", dec.label),
        "Holder continuity of truncated measures in total variation, C/delta^2 d^alpha",
    )
    .value("delta", deltas)
    .value("alpha", &alphas)
    .value("prefactor", &prefactors)
    .value("prefactor_ratio_per_halving", &ratios)
    .value("pairs_per_delta", &counts)
    .tol("alpha_min_exclusive", 0.0)
    .tol("prefactor_ratio", [1.0, 16.0])
    .samples(counts.iter().sum())
    .grid(provenance(dec))
    .verdict(pass))
}

/// Max of `|b(x) − b(y)| / d^½` over pairs with `0 < d ≤ reach`.
fn drift_quotient(dec: &LevyDecomposition, reach: f64) -> f64 {
    let b = dec.boundary_grid();
    let mut q: f64 = 0.0;
    for i in 0..dec.len() {
        for j in (i + 1)..dec.len() {
            let d = b.distance(i, j);
            if d <= reach {
                q = q.max((dec.drift()[i] - dec.drift()[j]).abs() / d.sqrt());
            }
        }
    }
    q
}

/// Hölder quotient of the drift stable (ratio ≤ 2) under one refinement.
pub fn verify_drift_holder(
    coarse: &LevyDecomposition,
    fine: &LevyDecomposition,
    reach: f64,
) -> Result<CheckRecord> {
    let (qc, qf) = (drift_quotient(coarse, reach), drift_quotient(fine, reach));
    let ratio = (qc / qf).max(qf / qc);
    Ok(CheckRecord::new(
        &format!("drift_holder/{}", coarse.label),
        "drift is Holder continuous",
    )
    .value("holder_quotient", [qc, qf])
    .value("exponent", 0.5)
    .value("reach", reach)
    .value("ratio", ratio)
    .tol("ratio_max", 2.0)
    .samples(coarse.len() + fine.len())
    .grid(format!("{}; {}", provenance(coarse), provenance(fine)))
    .verdict(ratio.is_finite() && ratio <= 2.0))
}
