//! TOML run configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryCurve, CurveFamily};
use crate::operator::{OperatorKind, OperatorSpec};

pub const SUITES: [&str; 7] = [
    "oracles",
    "linear_estimates",
    "nonlinear_estimates",
    "holder",
    "green",
    "barrier",
    "all",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Suites executed by `run`.
    #[serde(default = "default_suites")]
    pub suites: Vec<String>,
    #[serde(default)]
    pub out: Option<String>,
    /// Truncation radius as a fraction of the perimeter.
    #[serde(default = "default_r0_fraction")]
    pub r0_fraction: f64,
    pub domain: CurveFamily,
    pub operators: Vec<OperatorSpec>,
    pub grids: GridStudy,
    #[serde(default)]
    pub oracles: OracleConfig,
    #[serde(default)]
    pub nonlinear: NonlinearConfig,
    #[serde(default)]
    pub holder: HolderConfig,
    #[serde(default)]
    pub green: GreenConfig,
    #[serde(default)]
    pub barrier: BarrierConfig,
}

fn default_suites() -> Vec<String> {
    vec!["all".into()]
}

fn default_r0_fraction() -> f64 {
    0.125
}

/// Refinement sequence used for kernel and drift estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridStudy {
    pub spacings: Vec<f64>,
    pub boundary_nodes: Vec<usize>,
    /// Random smooth data used by the representation identity.
    #[serde(default = "default_trials")]
    pub representation_trials: usize,
}

fn default_trials() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub disk_spacings: Vec<f64>,
    pub disk_boundary_nodes: usize,
    pub drift_bound: f64,
    pub strip_length: f64,
    pub strip_heights: Vec<f64>,
    pub strip_spacing: f64,
    pub strip_separation: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            disk_spacings: vec![1.0 / 128.0, 1.0 / 256.0],
            disk_boundary_nodes: 256,
            drift_bound: 0.05,
            strip_length: 20.0,
            strip_heights: vec![8.0, 16.0],
            strip_spacing: 1.0 / 16.0,
            strip_separation: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NonlinearConfig {
    pub spacing: f64,
    pub boundary_nodes: usize,
    pub lambda: f64,
    #[serde(rename = "Lambda")]
    pub upper: f64,
    pub gcp_trials: usize,
    pub sandwich_pairs: usize,
    pub minmax_tests: usize,
    pub minmax_policies: usize,
    pub ring_spacing: f64,
    pub ring_boundary_nodes: usize,
    /// Ring radii in units of `P/2π`.
    pub ring_radii: Vec<f64>,
    /// Base points as fractions of the perimeter.
    pub ring_bases: Vec<f64>,
    pub degenerate_spacing: f64,
    /// `(x, y)` pairs as fractions of the perimeter.
    pub ball_pairs: Vec<[f64; 2]>,
    /// Ball radii as fractions of `d(x, y)`.
    pub ball_fractions: Vec<f64>,
    /// Annulus radii as fractions of the threshold `eps0`.
    pub annuli_fractions: Vec<f64>,
    pub annuli_bases: usize,
}

impl Default for NonlinearConfig {
    fn default() -> Self {
        Self {
            spacing: 1.0 / 32.0,
            boundary_nodes: 128,
            lambda: 1.0,
            upper: 2.0,
            gcp_trials: 100,
            sandwich_pairs: 50,
            minmax_tests: 5,
            minmax_policies: 20,
            ring_spacing: 1.0 / 128.0,
            ring_boundary_nodes: 256,
            ring_radii: vec![0.05, 0.1, 0.2],
            ring_bases: vec![0.0, 0.25, 0.390625],
            degenerate_spacing: 1.0 / 256.0,
            ball_pairs: vec![[0.0, 0.33203125], [0.15625, 0.546875]],
            ball_fractions: vec![1.0 / 40.0, 1.0 / 30.0, 1.0 / 20.0, 1.0 / 15.0, 1.0 / 11.0],
            annuli_fractions: vec![0.1, 0.25, 0.5, 0.75, 0.95],
            annuli_bases: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HolderConfig {
    pub spacings: Vec<f64>,
    pub boundary_nodes: Vec<usize>,
    /// Truncation radii in units of `P/2π`.
    pub deltas: Vec<f64>,
    /// Base points as fractions of the perimeter.
    pub bases: Vec<f64>,
    /// Max pair distance for the drift quotient, as a fraction of `P`.
    pub drift_reach: f64,
}

impl Default for HolderConfig {
    fn default() -> Self {
        Self {
            spacings: vec![1.0 / 64.0, 1.0 / 128.0],
            boundary_nodes: vec![256, 512],
            deltas: vec![0.2, 0.4, 0.8],
            bases: vec![0.0, 0.25, 1.0 / 3.0, 0.52734375],
            drift_reach: 1.0 / 16.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GreenConfig {
    pub spacing: f64,
    pub boundary_nodes: usize,
    pub pairs: usize,
    pub rhos: Vec<f64>,
    pub s0: f64,
}

impl Default for GreenConfig {
    fn default() -> Self {
        Self {
            spacing: 1.0 / 64.0,
            boundary_nodes: 512,
            pairs: 50,
            rhos: vec![0.05, 0.1, 0.2],
            s0: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BarrierConfig {
    pub lambda: f64,
    #[serde(rename = "Lambda")]
    pub upper: f64,
    pub n_dim: usize,
    pub b: f64,
    pub samples: usize,
}

impl Default for BarrierConfig {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            upper: 2.0,
            n_dim: 1,
            b: 1.0,
            samples: 100,
        }
    }
}

fn bad(key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        key: key.into(),
        message: message.into(),
    }
}

fn positive(key: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(key, format!("must be positive and finite, got {v}")))
    }
}

fn spacing(key: &str, v: f64) -> Result<()> {
    if v > 0.0 && v <= 0.5 {
        Ok(())
    } else {
        Err(bad(
            key,
            format!("grid spacing must lie in (0, 0.5], got {v}"),
        ))
    }
}

fn nodes(key: &str, n: usize) -> Result<()> {
    if (16..=8192).contains(&n) {
        Ok(())
    } else {
        Err(bad(
            key,
            format!("boundary node count must lie in [16, 8192], got {n}"),
        ))
    }
}

fn fractions(key: &str, v: &[f64]) -> Result<()> {
    match v.iter().find(|&&f| !(0.0..1.0).contains(&f)) {
        Some(f) => Err(bad(
            key,
            format!("perimeter fractions must lie in [0, 1), got {f}"),
        )),
        None => Ok(()),
    }
}

fn ellipticity(key: &str, lambda: f64, upper: f64) -> Result<()> {
    if lambda > 0.0 && upper >= lambda && upper.is_finite() {
        Ok(())
    } else {
        Err(bad(key, format!("ellipticity requires 0 < lambda <= Lambda, got lambda = {lambda}, Lambda = {upper}")))
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let key = e
                .span()
                .map(|s| format!("byte {}..{}", s.start, s.end))
                .unwrap_or_else(|| "<document>".into());
            bad(&key, e.message().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn curve(&self) -> Result<BoundaryCurve> {
        BoundaryCurve::new(self.domain.clone()).map_err(|e| bad("domain", e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        for s in &self.suites {
            if !SUITES.contains(&s.as_str()) {
                return Err(bad(
                    "suites",
                    format!("unknown suite `{s}`; expected one of {SUITES:?}"),
                ));
            }
        }
        if !(self.r0_fraction > 0.0 && self.r0_fraction < 0.5) {
            return Err(bad("r0_fraction", "must lie in (0, 0.5)"));
        }
        self.curve()?;
        if self.operators.is_empty() {
            return Err(bad("operators", "at least one operator is required"));
        }
        for (k, op) in self.operators.iter().enumerate() {
            let key = format!("operators[{k}]");
            ellipticity(&format!("{key}.Lambda"), op.lambda, op.upper)?;
            op.validate().map_err(|e| bad(&key, e.to_string()))?;
            if self.operators[..k].iter().any(|o| o.label == op.label) {
                return Err(bad(
                    &format!("{key}.label"),
                    format!("duplicate label `{}`", op.label),
                ));
            }
        }
        let g = &self.grids;
        if g.spacings.is_empty() || g.spacings.len() != g.boundary_nodes.len() {
            return Err(bad(
                "grids",
                "need one boundary node count per grid spacing",
            ));
        }
        for (k, &h) in g.spacings.iter().enumerate() {
            spacing(&format!("grids.spacings[{k}]"), h)?;
            nodes(&format!("grids.boundary_nodes[{k}]"), g.boundary_nodes[k])?;
        }
        if g.spacings.windows(2).any(|w| w[1] >= w[0]) {
            return Err(bad("grids.spacings", "must be strictly decreasing"));
        }
        let o = &self.oracles;
        if o.disk_spacings.len() < 2 || o.disk_spacings.windows(2).any(|w| w[1] >= w[0]) {
            return Err(bad(
                "oracles.disk_spacings",
                "need two or more strictly decreasing spacings",
            ));
        }
        for (k, &h) in o.disk_spacings.iter().enumerate() {
            spacing(&format!("oracles.disk_spacings[{k}]"), h)?;
        }
        nodes("oracles.disk_boundary_nodes", o.disk_boundary_nodes)?;
        positive("oracles.drift_bound", o.drift_bound)?;
        positive("oracles.strip_length", o.strip_length)?;
        spacing("oracles.strip_spacing", o.strip_spacing)?;
        positive("oracles.strip_separation", o.strip_separation)?;
        if o.strip_heights.len() != 2 || o.strip_heights.iter().any(|&v| !(v > 0.0)) {
            return Err(bad(
                "oracles.strip_heights",
                "need exactly two positive heights",
            ));
        }
        if o.strip_separation >= 0.5 * o.strip_length {
            return Err(bad(
                "oracles.strip_separation",
                "must be below half the strip length",
            ));
        }
        let n = &self.nonlinear;
        spacing("nonlinear.spacing", n.spacing)?;
        spacing("nonlinear.ring_spacing", n.ring_spacing)?;
        spacing("nonlinear.degenerate_spacing", n.degenerate_spacing)?;
        nodes("nonlinear.boundary_nodes", n.boundary_nodes)?;
        nodes("nonlinear.ring_boundary_nodes", n.ring_boundary_nodes)?;
        ellipticity("nonlinear.Lambda", n.lambda, n.upper)?;
        if n.ring_radii.is_empty() || n.ring_radii.iter().any(|&r| !(r > 0.0)) {
            return Err(bad("nonlinear.ring_radii", "need positive radii"));
        }
        fractions("nonlinear.ring_bases", &n.ring_bases)?;
        if n.ring_bases.len() * n.ring_radii.len() < 4 {
            return Err(bad(
                "nonlinear.ring_bases",
                "need at least four (base, radius) samples",
            ));
        }
        if n.ball_pairs.is_empty() {
            return Err(bad("nonlinear.ball_pairs", "need at least one pair"));
        }
        for (k, p) in n.ball_pairs.iter().enumerate() {
            fractions(&format!("nonlinear.ball_pairs[{k}]"), p)?;
        }
        if n.annuli_bases == 0 {
            return Err(bad(
                "nonlinear.annuli_bases",
                "need at least one base point",
            ));
        }
        if n.ball_fractions.len() < 4 || n.ball_fractions.iter().any(|&f| !(f > 0.0 && f < 0.1)) {
            return Err(bad(
                "nonlinear.ball_fractions",
                "need four or more fractions in (0, 0.1)",
            ));
        }
        if n.annuli_fractions.is_empty()
            || n.annuli_fractions.iter().any(|&f| !(f > 0.0 && f < 1.0))
        {
            return Err(bad(
                "nonlinear.annuli_fractions",
                "fractions of eps0 must lie in (0, 1)",
            ));
        }
        let h = &self.holder;
        if h.spacings.len() != 2 || h.boundary_nodes.len() != 2 {
            return Err(bad(
                "holder",
                "need exactly two spacings and two boundary node counts",
            ));
        }
        for k in 0..2 {
            spacing(&format!("holder.spacings[{k}]"), h.spacings[k])?;
            nodes(&format!("holder.boundary_nodes[{k}]"), h.boundary_nodes[k])?;
        }
        if h.deltas.len() < 2 || h.deltas.iter().any(|&d| !(d > 0.0)) {
            return Err(bad(
                "holder.deltas",
                "need two or more positive truncation radii",
            ));
        }
        if h.bases.is_empty() {
            return Err(bad("holder.bases", "need at least one base point"));
        }
        fractions("holder.bases", &h.bases)?;
        if !(h.drift_reach > 0.0 && h.drift_reach < 0.5) {
            return Err(bad("holder.drift_reach", "must lie in (0, 0.5)"));
        }
        let gr = &self.green;
        spacing("green.spacing", gr.spacing)?;
        nodes("green.boundary_nodes", gr.boundary_nodes)?;
        if gr.pairs == 0 {
            return Err(bad("green.pairs", "need at least one pair"));
        }
        if gr.rhos.is_empty() || gr.rhos.iter().any(|&r| !(r > 0.0)) {
            return Err(bad("green.rhos", "need positive radii"));
        }
        if !(gr.s0 > 1.0) {
            return Err(bad("green.s0", "must exceed 1"));
        }
        let b = &self.barrier;
        ellipticity("barrier.Lambda", b.lambda, b.upper)?;
        positive("barrier.b", b.b)?;
        if b.n_dim == 0 || b.samples == 0 {
            return Err(bad("barrier", "n_dim and samples must be positive"));
        }
        Ok(())
    }

    pub fn linear_operators(&self) -> impl Iterator<Item = &OperatorSpec> {
        self.operators.iter().filter(|o| o.kind.is_linear())
    }

    pub fn bellman_operators(&self) -> impl Iterator<Item = &OperatorSpec> {
        self.operators.iter().filter(|o| !o.kind.is_linear())
    }

    /// Operators whose discrete stencils are Pucci combinations, so the
    /// extremal sandwich holds exactly in the bulk.
    pub fn sandwich_operators(&self) -> impl Iterator<Item = &OperatorSpec> {
        self.operators
            .iter()
            .filter(|o| o.kind != OperatorKind::Divergence)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
seed = 1
[domain]
family = "circle"
radius = 1.0
[[operators]]
kind = "nondivergence"
label = "laplacian"
lambda = 1.0
Lambda = 1.0
controls = [{ type = "constant", a1 = 1.0, a2 = 1.0 }]
[grids]
spacings = [0.125]
boundary_nodes = [32]
"#;

    #[test]
    fn minimal_config_parses() {
        let c = RunConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(c.suites, vec!["all"]);
        assert_eq!(c.oracles.strip_heights, vec![8.0, 16.0]);
    }

    #[test]
    fn inverted_ellipticity_names_the_key() {
        let text = MINIMAL.replace("Lambda = 1.0", "Lambda = 0.5");
        let err = RunConfig::from_toml(&text).unwrap_err().to_string();
        assert!(err.contains("ellipticity"), "{err}");
        assert!(err.contains("operators[0].Lambda"), "{err}");
    }

    #[test]
    fn unknown_suite_is_rejected() {
        let text = MINIMAL.replace("seed = 1", "seed = 1\nsuites = [\"everything\"]");
        assert!(matches!(
            RunConfig::from_toml(&text),
            Err(Error::Config { .. })
        ));
    }

    #[test]
    fn unknown_key_is_rejected() {
        let text = MINIMAL.replace("seed = 1", "seed = 1\nsede = 2");
        assert!(matches!(
            RunConfig::from_toml(&text),
            Err(Error::Config { .. })
        ));
    }
}
