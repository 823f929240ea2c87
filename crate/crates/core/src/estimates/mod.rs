//! Quantitative verifications: power-law fits, oracle comparisons, Hölder
//! moduli, comparison properties and closed-form identities.
//!
//! Every check returns a [`CheckRecord`] carrying the measured values next to
//! the thresholds it was judged against.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

mod barrier;
mod green;
mod kernel;
mod nonlinear;

pub use barrier::{pucci_plus, verify_barrier};
pub use green::{boundary_distance, disk_green, verify_green_suite, GreenSetup};
pub use kernel::{
    disk_kernel, verify_disk_oracle, verify_drift_bounded, verify_drift_halving,
    verify_drift_holder, verify_kernel_bounds, verify_kernel_stability, verify_representation,
    verify_strip_oracle, verify_tv_holder,
};
pub use nonlinear::{
    disk_bump_integral, verify_annuli, verify_ball_positivity, verify_degenerate_ring, verify_gcp,
    verify_minmax, verify_ring_law, verify_sandwich,
};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Least-squares fit of `log y = intercept + slope·log t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub slope: f64,
    pub intercept: f64,
    /// Max relative deviation of the data from the fitted power law.
    pub residual: f64,
    pub samples: usize,
}

impl PowerFit {
    pub fn prefactor(&self) -> f64 {
        self.intercept.exp()
    }
}

pub fn fit_power_law(samples: &[(f64, f64)]) -> Result<PowerFit> {
    if samples.len() < 4 {
        return Err(Error::Input(format!(
            "power-law fit needs at least 4 samples, got {}",
            samples.len()
        )));
    }
    if let Some(&(t, y)) = samples
        .iter()
        .find(|&&(t, y)| !(t > 0.0 && y > 0.0 && t.is_finite() && y.is_finite()))
    {
        return Err(Error::Input(format!(
            "power-law fit needs positive samples, got ({t}, {y})"
        )));
    }
    let n = samples.len() as f64;
    let logs: Vec<(f64, f64)> = samples.iter().map(|&(t, y)| (t.ln(), y.ln())).collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Input(
            "power-law fit needs at least two distinct scales".into(),
        ));
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = samples
        .iter()
        .map(|&(t, y)| ((intercept + slope * t.ln()).exp() - y).abs() / y)
        .fold(0.0, f64::max);
    Ok(PowerFit {
        slope,
        intercept,
        residual,
        samples: samples.len(),
    })
}

/// One verification outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub paper_anchor: String,
    pub values: BTreeMap<String, Value>,
    pub tolerance: BTreeMap<String, Value>,
    pub pass: bool,
    pub samples: usize,
    pub grid: String,
    /// Worst-case datum of a failed (or marginal) check.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub worst: Option<Value>,
}

impl CheckRecord {
    pub fn new(name: &str, anchor: &str) -> Self {
        Self {
            name: name.into(),
            paper_anchor: anchor.into(),
            values: BTreeMap::new(),
            tolerance: BTreeMap::new(),
            pass: false,
            samples: 0,
            grid: String::new(),
            worst: None,
        }
    }

    pub fn value(mut self, key: &str, v: impl Serialize) -> Self {
        self.values.insert(key.into(), to_value(v));
        self
    }

    pub fn tol(mut self, key: &str, v: impl Serialize) -> Self {
        self.tolerance.insert(key.into(), to_value(v));
        self
    }

    pub fn grid(mut self, g: impl Into<String>) -> Self {
        self.grid = g.into();
        self
    }

    pub fn samples(mut self, n: usize) -> Self {
        self.samples = n;
        self
    }

    pub fn worst(mut self, v: impl Serialize) -> Self {
        self.worst = Some(to_value(v));
        self
    }

    pub fn verdict(mut self, pass: bool) -> Self {
        self.pass = pass;
        self
    }

    /// One-line summary for logs and the acceptance harness.
    pub fn summary(&self) -> String {
        let vals: Vec<String> = self
            .values
            .iter()
            .take(6)
            .map(|(k, v)| format!("{k}={}", short(v)))
            .collect();
        format!(
            "[{}] {} ({})",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            vals.join(", ")
        )
    }
}

fn short(v: &Value) -> String {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.4e}"),
            _ => n.to_string(),
        },
        Value::Array(a) if a.len() > 4 => format!("[{} items]", a.len()),
        other => other.to_string(),
    }
}

/// JSON value with non-finite floats mapped to `null`.
fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub schema_version: u32,
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
}

impl EstimateReport {
    /// Checks are ordered by name so the report is independent of job order.
    pub fn new(suite: &str, seed: u64, mut checks: Vec<CheckRecord>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let pass = checks.iter().all(|c| c.pass);
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            suite: suite.into(),
            seed,
            checks,
            pass,
        }
    }

    pub fn failed(&self) -> Vec<&CheckRecord> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

/// Max of a slice, `-inf` when empty.
pub(crate) fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

pub(crate) fn min_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_is_recovered() {
        let s: Vec<(f64, f64)> = (1..=6)
            .map(|k| (k as f64 * 0.3, 2.5 * (k as f64 * 0.3).powf(-2.0)))
            .collect();
        let f = fit_power_law(&s).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-12);
        assert!((f.prefactor() - 2.5).abs() < 1e-12);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn fit_rejects_bad_input() {
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)]).is_err());
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, 0.0), (3.0, 3.0), (4.0, 1.0)]).is_err());
        assert!(fit_power_law(&[(1.0, 1.0), (1.0, 2.0), (1.0, 3.0), (1.0, 1.0)]).is_err());
    }

    #[test]
    fn report_orders_checks_by_name() {
        let r = EstimateReport::new(
            "x",
            1,
            vec![
                CheckRecord::new("b", "").verdict(true),
                CheckRecord::new("a", "").verdict(false),
            ],
        );
        assert_eq!(r.checks[0].name, "a");
        assert!(!r.pass);
        assert_eq!(r.failed().len(), 1);
    }
}
