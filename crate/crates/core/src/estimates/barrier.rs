//! Closed-form radial barrier `f(x) = g(|x|)`, `g(t) = −t(t − b)`.

use super::{max_of, CheckRecord};
use crate::error::{Error, Result};

/// `M⁺` of a symmetric matrix given by its eigenvalues.
pub fn pucci_plus(eigenvalues: &[f64], lambda: f64, upper: f64) -> f64 {
    eigenvalues
        .iter()
        .map(|&e| if e > 0.0 { upper * e } else { lambda * e })
        .sum()
}

/// Hessian of `g(|x|)` in `R^{n+1}` at `x = t·e`, as a dense matrix.
fn hessian(t: f64, b: f64, dir: &[f64]) -> Vec<Vec<f64>> {
    let (g1, g2) = (b - 2.0 * t, -2.0);
    let m = dir.len();
    (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let ee = dir[i] * dir[j];
                    let id = if i == j { 1.0 } else { 0.0 };
                    g2 * ee + (g1 / t) * (id - ee)
                })
                .collect()
        })
        .collect()
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
fn symmetric_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let m = a.len();
    for _ in 0..64 {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j].powi(2))
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..m).map(|i| a[i][i]).collect()
}

/// Evaluates `M⁺(D²f)` from the Hessian's eigenvalues at sample radii in
/// `(0, b/2)` and a fixed set of directions, and compares with
/// `nΛ(−2 + b/t) − 2λ`; checks `≤ −λ` on `(a₀b, b/2)`, `≤ 0` beyond `b/2`,
/// and the limit `−2λ` at `t → (b/2)⁻`.
pub fn verify_barrier(
    lambda: f64,
    upper: f64,
    n_dim: usize,
    b: f64,
    samples: usize,
) -> Result<CheckRecord> {
    if !(b > 0.0) || !(lambda > 0.0 && upper >= lambda) || n_dim == 0 || samples == 0 {
        return Err(Error::Input(
            "barrier check needs b > 0, 0 < lambda <= Lambda, n >= 1, samples >= 1".into(),
        ));
    }
    let n = n_dim as f64;
    let closed = |t: f64| n * upper * (-2.0 + b / t) - 2.0 * lambda;
    let dim = n_dim + 1;
    let direction = |k: usize| -> Vec<f64> {
        // Deterministic unit directions spread over the sphere.
        let v: Vec<f64> = (0..dim)
            .map(|i| ((k * (i + 1)) as f64 * 0.7 + i as f64).cos() + 1e-3)
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.into_iter().map(|x| x / norm).collect()
    };
    let pucci_at = |t: f64, k: usize| {
        pucci_plus(
            &symmetric_eigenvalues(hessian(t, b, &direction(k))),
            lambda,
            upper,
        )
    };

    let mut identity_err: f64 = 0.0;
    for k in 0..samples {
        let t = 0.5 * b * (k as f64 + 0.5) / samples as f64;
        let v = pucci_at(t, k);
        identity_err = identity_err.max((v - closed(t)).abs() / closed(t).abs().max(1.0));
    }
    let a0 = 1.0 / (2.0 + lambda / (n * upper));
    let plateau = max_of((0..samples).map(|k| {
        let t = b * (a0 + (0.5 - a0) * (k as f64 + 0.5) / samples as f64);
        pucci_at(t, k)
    }));
    let beyond =
        max_of((1..=samples).map(|k| pucci_at(0.5 * b * (1.0 + k as f64 / samples as f64), k)));
    let limit = pucci_at(0.5 * b * (1.0 - 1e-12), 0);
    let limit_err = (limit + 2.0 * lambda).abs();
    let quarter = (closed(0.25 * b) - (2.0 * n * upper - 2.0 * lambda)).abs();
    let pass = identity_err <= 1e-10
        && plateau <= -lambda
        && beyond <= 0.0
        && limit_err <= 1e-9
        && quarter <= 1e-12;
    Ok(CheckRecord::new(
        "barrier_identity",
        "radial barrier g(t) = -t(t-b): M+ = n Lambda(-2 + b/t) - 2 lambda",
    )
    .value("identity_rel_error", identity_err)
    .value("a0", a0)
    .value("max_on_plateau", plateau)
    .value("max_beyond_half", beyond)
    .value("limit_at_half", limit)
    .value("lambda", lambda)
    .value("Lambda", upper)
    .value("n", n_dim)
    .value("b", b)
    .tol("identity_rel_error", 1e-10)
    .tol("max_on_plateau", -lambda)
    .tol("max_beyond_half", 0.0)
    .tol("limit_abs_error", 1e-9)
    .samples(3 * samples)
    .grid("closed form")
    .verdict(pass))
}
