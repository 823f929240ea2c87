//! Dirichlet-to-Neumann maps `I(φ, x) = ∂_ν U_φ(x)` and their matrices.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::domain::{DomainGrid, NormalProbe};
use crate::error::{Error, Result};
use crate::geometry::{fmt, BoundaryGrid};
use crate::operator::{OperatorKind, OperatorSpec};
use crate::solver::{EllipticSolver, LinearSystem, SolutionField};

/// Right-hand sides solved per block during matrix assembly.
const BLOCK: usize = 32;

/// Dense D-to-N matrix acting on nodal boundary values.
#[derive(Debug, Clone)]
pub struct DtNMatrix {
    n: usize,
    /// Row-major entries `M_ij`.
    data: Vec<f64>,
    bgrid: BoundaryGrid,
    pub label: String,
    pub h: f64,
}

impl DtNMatrix {
    pub fn from_rows(data: Vec<f64>, bgrid: BoundaryGrid, label: &str, h: f64) -> Result<Self> {
        let n = bgrid.len();
        if data.len() != n * n {
            return Err(Error::Input(format!(
                "matrix has {} entries, expected {}",
                data.len(),
                n * n
            )));
        }
        Ok(Self {
            n,
            data,
            bgrid,
            label: label.into(),
            h,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn boundary_grid(&self) -> &BoundaryGrid {
        &self.bgrid
    }

    pub fn apply(&self, phi: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(phi).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).iter().sum()).collect()
    }

    /// Most negative off-diagonal entry (0 if none are negative).
    pub fn min_off_diagonal(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    m = m.min(self.get(i, j));
                }
            }
        }
        m
    }

    /// Infinity norm.
    pub fn norm(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["i", "j", "M_ij"])?;
        for i in 0..self.n {
            for j in 0..self.n {
                w.write_record(&[i.to_string(), j.to_string(), fmt(self.get(i, j))])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn sidecar(&self) -> serde_json::Value {
        serde_json::json!({
            "label": self.label,
            "h": self.h,
            "boundary_nodes": self.n,
            "perimeter": self.bgrid.perimeter(),
        })
    }
}

/// `∂_ν U_φ` at the boundary nodes for any operator kind.
pub struct DtnOperator<'g> {
    solver: EllipticSolver<'g>,
    bgrid: BoundaryGrid,
    probes: Vec<NormalProbe>,
    label: String,
}

impl<'g> DtnOperator<'g> {
    pub fn new(spec: &OperatorSpec, grid: &'g DomainGrid, bgrid: &BoundaryGrid) -> Result<Self> {
        if (bgrid.perimeter() - grid.boundary().perimeter()).abs() > 1e-9 * bgrid.perimeter() {
            return Err(Error::Input(
                "boundary grid does not belong to the domain grid".into(),
            ));
        }
        let solver = EllipticSolver::new(spec, grid)?;
        let probes = bgrid
            .arcs()
            .iter()
            .map(|&s| grid.normal_probe(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            solver,
            bgrid: bgrid.clone(),
            probes,
            label: spec.label.clone(),
        })
    }

    pub fn solver(&self) -> &EllipticSolver<'g> {
        &self.solver
    }

    pub fn grid(&self) -> &'g DomainGrid {
        self.solver.grid()
    }

    pub fn boundary_grid(&self) -> &BoundaryGrid {
        &self.bgrid
    }

    pub fn kind(&self) -> OperatorKind {
        self.solver.kind()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn probes(&self) -> &[NormalProbe] {
        &self.probes
    }

    /// Nodes whose probe fell back to first order.
    pub fn downgraded_nodes(&self) -> Vec<usize> {
        self.probes
            .iter()
            .enumerate()
            .filter(|(_, p)| p.first_order)
            .map(|(i, _)| i)
            .collect()
    }

    /// Evaluates the D-to-N map on nodal data.
    pub fn evaluate(&self, phi: &[f64]) -> Result<Vec<f64>> {
        self.check_len(phi)?;
        let sol = self.solver.solve_nodal(&self.bgrid, phi)?;
        Ok(self.normal_derivatives(&sol, phi))
    }

    /// Evaluates with a frozen control policy (Bellman) or the linear operator.
    pub fn evaluate_with_policy(&self, policy: &[usize], phi: &[f64]) -> Result<Vec<f64>> {
        self.check_len(phi)?;
        let sys = self.solver.frozen_system(policy)?;
        let sol = sys.solve_dirichlet(self.grid(), &self.grid().cut_values(&self.bgrid, phi));
        Ok(self.normal_derivatives(&sol, phi))
    }

    /// Full solve for nodal data; exposes the field and Bellman policy.
    pub fn solve(&self, phi: &[f64]) -> Result<SolutionField> {
        self.check_len(phi)?;
        self.solver.solve_nodal(&self.bgrid, phi)
    }

    /// `∂_ν U` at arc length `s` for data given as a function of `(s, point)`.
    pub fn evaluate_function_at(&self, f: &dyn Fn(f64, [f64; 2]) -> f64, s: f64) -> Result<f64> {
        let g = self.grid().cut_values_fn(f);
        let sol = self.solver.solve_cuts(&g)?;
        let (p, _) = self.grid().boundary().point_and_normal(s)?;
        let probe = self.grid().normal_probe(s)?;
        Ok(probe.apply(&sol.values, f(s, p)))
    }

    fn normal_derivatives(&self, sol: &SolutionField, phi: &[f64]) -> Vec<f64> {
        self.probes
            .iter()
            .zip(phi)
            .map(|(p, &v)| p.apply(&sol.values, v))
            .collect()
    }

    fn check_len(&self, phi: &[f64]) -> Result<()> {
        if phi.len() != self.bgrid.len() {
            return Err(Error::Input(format!(
                "boundary vector has length {}, grid has {} nodes",
                phi.len(),
                self.bgrid.len()
            )));
        }
        if phi.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("boundary data must be finite".into()));
        }
        Ok(())
    }

    /// D-to-N matrix of a linear operator: column `j` is the image of the
    /// hat function at boundary node `j`.
    pub fn assemble_matrix(&self) -> Result<DtNMatrix> {
        let sys = self
            .solver
            .linear_system()
            .ok_or_else(|| Error::Input("matrix assembly needs a linear operator".into()))?;
        self.matrix_of(sys, &self.label)
    }

    /// Solves for `φ`, freezes the converged policy and assembles the linear
    /// D-to-N matrix of the frozen-coefficient operator.
    pub fn frozen_policy_matrix(&self, phi: &[f64]) -> Result<(DtNMatrix, Vec<usize>)> {
        if self.kind().is_linear() {
            return Ok((self.assemble_matrix()?, vec![0; self.grid().len()]));
        }
        let sol = self.solve(phi)?;
        let policy = sol.policy.expect("Bellman solve returns a policy");
        let sys = self.solver.frozen_system(&policy)?;
        let m = self.matrix_of(&sys, &format!("{}_frozen", self.label))?;
        Ok((m, policy))
    }

    pub fn policy_matrix(&self, policy: &[usize]) -> Result<DtNMatrix> {
        let sys = self.solver.frozen_system(policy)?;
        self.matrix_of(&sys, &format!("{}_policy", self.label))
    }

    fn matrix_of(&self, sys: &LinearSystem, label: &str) -> Result<DtNMatrix> {
        let grid = self.grid();
        let nb = self.bgrid.len();
        let nn = grid.len();
        let mut data = vec![0.0; nb * nb];
        let mut basis = vec![0.0; nb];
        let mut start = 0;
        while start < nb {
            let cols = BLOCK.min(nb - start);
            let mut rhs = vec![0.0; nn * cols];
            for c in 0..cols {
                basis.iter_mut().for_each(|v| *v = 0.0);
                basis[start + c] = 1.0;
                let g = grid.cut_values(&self.bgrid, &basis);
                rhs[c * nn..(c + 1) * nn].copy_from_slice(&sys.boundary_rhs(grid, &g));
            }
            sys.solve_block(&mut rhs, cols);
            for c in 0..cols {
                let j = start + c;
                let u = &rhs[c * nn..(c + 1) * nn];
                for (i, probe) in self.probes.iter().enumerate() {
                    let bv = if i == j { 1.0 } else { 0.0 };
                    data[i * nb + j] = probe.apply(u, bv);
                }
            }
            start += cols;
        }
        DtNMatrix::from_rows(data, self.bgrid.clone(), label, grid.h())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Extremal {
    Minus,
    Plus,
}

/// Boundary extremal operator `M^∓` built on the discrete Pucci surrogate.
pub fn extremal_operator<'g>(
    sign: Extremal,
    lambda: f64,
    upper: f64,
    grid: &'g DomainGrid,
    bgrid: &BoundaryGrid,
) -> Result<DtnOperator<'g>> {
    let kind = match sign {
        Extremal::Minus => OperatorKind::BellmanMin,
        Extremal::Plus => OperatorKind::BellmanMax,
    };
    DtnOperator::new(&OperatorSpec::pucci(kind, lambda, upper), grid, bgrid)
}

pub fn extremal_dtn(
    sign: Extremal,
    lambda: f64,
    upper: f64,
    grid: &DomainGrid,
    bgrid: &BoundaryGrid,
    phi: &[f64],
) -> Result<Vec<f64>> {
    extremal_operator(sign, lambda, upper, grid, bgrid)?.evaluate(phi)
}

#[derive(Debug, Clone, Serialize)]
pub struct GcpReport {
    pub trials: usize,
    pub seed: u64,
    pub max_violation: f64,
    pub worst_node: Option<usize>,
}

/// Random smooth periodic function: a few Fourier modes in arc length.
pub fn random_smooth(bgrid: &BoundaryGrid, rng: &mut impl Rng, modes: usize) -> Vec<f64> {
    let p = bgrid.perimeter();
    let coeffs: Vec<(f64, f64)> = (0..=modes)
        .map(|k| {
            (
                rng.gen_range(-1.0..1.0) / (1 + k) as f64,
                rng.gen_range(-1.0..1.0) / (1 + k) as f64,
            )
        })
        .collect();
    bgrid.sample(|s| {
        coeffs
            .iter()
            .enumerate()
            .map(|(k, &(a, b))| {
                let w = std::f64::consts::TAU * k as f64 * s / p;
                a * w.cos() + b * w.sin()
            })
            .sum()
    })
}

/// Touching pair `(u, v = u + q)` with `q ≥ 0` smooth and `q(x₀) = 0`.
pub fn touching_pair(bgrid: &BoundaryGrid, rng: &mut impl Rng, x0: usize) -> (Vec<f64>, Vec<f64>) {
    let u = random_smooth(bgrid, rng, 4);
    let p = bgrid.perimeter();
    let s0 = bgrid.arc(x0);
    let amp = rng.gen_range(0.1..1.0);
    let wobble = random_smooth(bgrid, rng, 2);
    let v = u
        .iter()
        .zip(bgrid.arcs())
        .zip(&wobble)
        .map(|((&ui, &s), &wb)| {
            let bump = 1.0 - (std::f64::consts::TAU * (s - s0) / p).cos();
            ui + amp * bump * (1.5 + 0.5 * wb.tanh())
        })
        .collect();
    (u, v)
}

/// Global comparison property: `I(u, x₀) ≤ I(v, x₀)` for touching pairs.
pub fn check_gcp(op: &DtnOperator, trials: usize, seed: u64) -> Result<GcpReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nb = op.boundary_grid().len();
    let mut worst = 0.0f64;
    let mut worst_node = None;
    for _ in 0..trials {
        let x0 = rng.gen_range(0..nb);
        let (u, v) = touching_pair(op.boundary_grid(), &mut rng, x0);
        let iu = op.evaluate(&u)?;
        let iv = op.evaluate(&v)?;
        let violation = iu[x0] - iv[x0];
        if violation > worst {
            worst = violation;
            worst_node = Some(x0);
        }
    }
    Ok(GcpReport {
        trials,
        seed,
        max_violation: worst,
        worst_node,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BoundaryCurve;

    #[test]
    fn constants_map_to_zero() {
        let c = BoundaryCurve::ellipse(2.0, 1.0).unwrap();
        let g = DomainGrid::build(&c, 1.0 / 16.0).unwrap();
        let b = c.build_boundary_grid(64).unwrap();
        let op = DtnOperator::new(&OperatorSpec::laplacian(), &g, &b).unwrap();
        let out = op.evaluate(&vec![1.0; 64]).unwrap();
        assert!(out.iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn matrix_reproduces_evaluation() {
        let c = BoundaryCurve::unit_disk();
        let g = DomainGrid::build(&c, 1.0 / 16.0).unwrap();
        let b = c.build_boundary_grid(40).unwrap();
        let op = DtnOperator::new(&OperatorSpec::laplacian(), &g, &b).unwrap();
        let m = op.assemble_matrix().unwrap();
        let phi = b.sample(f64::sin);
        let direct = op.evaluate(&phi).unwrap();
        let via = m.apply(&phi);
        for (a, b) in direct.iter().zip(&via) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!(m.row_sums().iter().all(|v| v.abs() < 1e-8));
    }

    #[test]
    fn wrong_length_is_rejected() {
        let c = BoundaryCurve::unit_disk();
        let g = DomainGrid::build(&c, 0.125).unwrap();
        let b = c.build_boundary_grid(16).unwrap();
        let op = DtnOperator::new(&OperatorSpec::laplacian(), &g, &b).unwrap();
        assert!(matches!(op.evaluate(&[0.0; 3]), Err(Error::Input(_))));
    }
}
