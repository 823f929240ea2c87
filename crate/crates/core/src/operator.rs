//! Bulk operator descriptions and their monotone cut-cell discretization.

use serde::{Deserialize, Serialize};

use crate::domain::{Arm, DomainGrid};
use crate::error::{Error, Result};
use crate::geometry::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    /// `div(A∇U)`.
    Divergence,
    /// `tr(A D²U)`.
    Nondivergence,
    /// `min_a tr(A_a D²U)` over the control set.
    BellmanMin,
    /// `max_a tr(A_a D²U)` over the control set.
    BellmanMax,
}

impl OperatorKind {
    pub fn is_linear(self) -> bool {
        matches!(self, OperatorKind::Divergence | OperatorKind::Nondivergence)
    }
}

/// Diagonal coefficient field `A(x) = diag(a₁(x), a₂(x))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CoefficientField {
    Constant {
        a1: f64,
        a2: f64,
    },
    /// `a_i(x) = mid + amplitude·|x − center|^exponent·cos(frequency·(x − center)_i + phase_i)`.
    Holder {
        mid: f64,
        amplitude: f64,
        exponent: f64,
        center: [f64; 2],
        frequency: f64,
        phase: [f64; 2],
    },
}

impl CoefficientField {
    pub fn identity() -> Self {
        CoefficientField::Constant { a1: 1.0, a2: 1.0 }
    }

    /// Hölder field centred between `lambda` and `upper`, with amplitude
    /// chosen so the entries stay in `[lambda, upper]` within `radius` of `center`.
    pub fn holder(
        lambda: f64,
        upper: f64,
        exponent: f64,
        center: Point,
        radius: f64,
        phase: [f64; 2],
    ) -> Self {
        let mid = 0.5 * (lambda + upper);
        let amplitude = 0.9 * 0.5 * (upper - lambda) / radius.powf(exponent);
        CoefficientField::Holder {
            mid,
            amplitude,
            exponent,
            center,
            frequency: 3.0,
            phase,
        }
    }

    pub fn eval(&self, p: Point) -> [f64; 2] {
        match *self {
            CoefficientField::Constant { a1, a2 } => [a1, a2],
            CoefficientField::Holder {
                mid,
                amplitude,
                exponent,
                center,
                frequency,
                phase,
            } => {
                let d = [p[0] - center[0], p[1] - center[1]];
                let r = d[0].hypot(d[1]).powf(exponent);
                [
                    mid + amplitude * r * (frequency * d[0] + phase[0]).cos(),
                    mid + amplitude * r * (frequency * d[1] + phase[1]).cos(),
                ]
            }
        }
    }
}

/// A bulk elliptic operator: kind, coefficient field(s) and ellipticity pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    /// One field for linear kinds; the control set for Bellman kinds.
    pub controls: Vec<CoefficientField>,
    pub lambda: f64,
    #[serde(rename = "Lambda")]
    pub upper: f64,
    pub label: String,
}

impl OperatorSpec {
    pub fn laplacian() -> Self {
        Self::nondivergence(CoefficientField::identity(), 1.0, 1.0, "laplacian")
    }

    pub fn divergence(field: CoefficientField, lambda: f64, upper: f64, label: &str) -> Self {
        Self {
            kind: OperatorKind::Divergence,
            controls: vec![field],
            lambda,
            upper,
            label: label.into(),
        }
    }

    pub fn nondivergence(field: CoefficientField, lambda: f64, upper: f64, label: &str) -> Self {
        Self {
            kind: OperatorKind::Nondivergence,
            controls: vec![field],
            lambda,
            upper,
            label: label.into(),
        }
    }

    pub fn bellman(
        kind: OperatorKind,
        controls: Vec<CoefficientField>,
        lambda: f64,
        upper: f64,
        label: &str,
    ) -> Self {
        Self {
            kind,
            controls,
            lambda,
            upper,
            label: label.into(),
        }
    }

    /// Discrete Pucci surrogate: `diag(a₁, a₂)` with `a_i ∈ {λ, (λ+Λ)/2, Λ}`.
    pub fn pucci(kind: OperatorKind, lambda: f64, upper: f64) -> Self {
        let levels = [lambda, 0.5 * (lambda + upper), upper];
        let controls = levels
            .iter()
            .flat_map(|&a1| {
                levels
                    .iter()
                    .map(move |&a2| CoefficientField::Constant { a1, a2 })
            })
            .collect();
        let label = match kind {
            OperatorKind::BellmanMin => "pucci_minus",
            _ => "pucci_plus",
        };
        Self {
            kind,
            controls,
            lambda,
            upper,
            label: label.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !(self.upper >= self.lambda) || !self.upper.is_finite() {
            return Err(Error::Spec(format!(
                "ellipticity requires 0 < lambda <= Lambda (got {}, {})",
                self.lambda, self.upper
            )));
        }
        if self.controls.is_empty() {
            return Err(Error::Spec("control set is empty".into()));
        }
        if self.kind.is_linear() && self.controls.len() != 1 {
            return Err(Error::Spec(
                "linear operators take exactly one coefficient field".into(),
            ));
        }
        Ok(())
    }
}

/// Per-arm coefficients of one control's discrete operator.
///
/// Row `n` reads `(LU)_n = -Σ_a c[n][a]·U_n + Σ_a c[n][a]·U(arm a)`.
#[derive(Debug, Clone)]
pub struct ControlStencil {
    pub coef: Vec<[f64; 4]>,
}

impl ControlStencil {
    pub fn diagonal(&self, n: usize) -> f64 {
        -self.coef[n].iter().sum::<f64>()
    }

    /// `(LU)_n` with cut-point data `g`.
    pub fn apply_row(&self, grid: &DomainGrid, n: usize, u: &[f64], g: &[f64]) -> f64 {
        let c = &self.coef[n];
        let mut acc = 0.0;
        for (a, arm) in grid.node(n).arms.iter().enumerate() {
            let v = match *arm {
                Arm::Node(m) => u[m],
                Arm::Cut { point, .. } => g[point],
            };
            acc += c[a] * (v - u[n]);
        }
        acc
    }
}

#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub kind: OperatorKind,
    pub label: String,
    pub controls: Vec<ControlStencil>,
}

impl DiscreteOperator {
    pub fn assemble(spec: &OperatorSpec, grid: &DomainGrid) -> Result<Self> {
        spec.validate()?;
        let slack = 1e-12 * spec.upper;
        let mut controls = Vec::with_capacity(spec.controls.len());
        for field in &spec.controls {
            let mut coef = Vec::with_capacity(grid.len());
            for (n, node) in grid.nodes().iter().enumerate() {
                let a = field.eval(node.pos);
                if a.iter()
                    .any(|&v| !(v >= spec.lambda - slack && v <= spec.upper + slack))
                {
                    return Err(Error::Spec(format!(
                        "ellipticity violated at node {n} {:?}: A = diag({}, {}) outside [{}, {}]",
                        node.index, a[0], a[1], spec.lambda, spec.upper
                    )));
                }
                let arms = node.arms.map(|arm| arm.len(grid.h()));
                let mut c = [0.0; 4];
                match spec.kind {
                    OperatorKind::Divergence => {
                        // Face-averaged flux form with the symmetric cut-cell
                        // closure: off-diagonals between interior nodes are
                        // a(face)/h² in both directions.
                        for k in 0..4 {
                            let axis = k / 2;
                            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                            let mut face = node.pos;
                            face[axis] += sign * 0.5 * arms[k];
                            let af = field.eval(face)[axis];
                            c[k] = af / (grid.h() * arms[k]);
                        }
                    }
                    _ => {
                        for axis in 0..2 {
                            let (r, l) = (arms[2 * axis], arms[2 * axis + 1]);
                            c[2 * axis] = 2.0 * a[axis] / (r * (r + l));
                            c[2 * axis + 1] = 2.0 * a[axis] / (l * (r + l));
                        }
                    }
                }
                coef.push(c);
            }
            controls.push(ControlStencil { coef });
        }
        Ok(Self {
            kind: spec.kind,
            label: spec.label.clone(),
            controls,
        })
    }

    pub fn num_controls(&self) -> usize {
        self.controls.len()
    }

    /// Stencil mixing controls per node according to `policy`.
    pub fn frozen(&self, policy: &[usize]) -> ControlStencil {
        ControlStencil {
            coef: policy
                .iter()
                .enumerate()
                .map(|(n, &a)| self.controls[a].coef[n])
                .collect(),
        }
    }

    /// Coordinate-list (row, col, value) entries of one control over the
    /// interior unknowns; boundary couplings use column `-1 - cut`.
    pub fn triplets(&self, grid: &DomainGrid, control: usize) -> Vec<(usize, i64, f64)> {
        let st = &self.controls[control];
        let mut out = Vec::new();
        for (n, node) in grid.nodes().iter().enumerate() {
            out.push((n, n as i64, st.diagonal(n)));
            for (a, arm) in node.arms.iter().enumerate() {
                let col = match *arm {
                    Arm::Node(m) => m as i64,
                    Arm::Cut { point, .. } => -1 - point as i64,
                };
                out.push((n, col, st.coef[n][a]));
            }
        }
        out
    }
}
