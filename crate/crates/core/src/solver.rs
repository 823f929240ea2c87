//! Dirichlet solvers: sparse LU for linear operators, policy iteration for
//! Bellman operators, plus discrete Green functions and harmonic measures.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMat, Triplet};
use faer::MatMut;

use crate::domain::{Arm, DomainGrid};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryGrid, Point};
use crate::operator::{ControlStencil, DiscreteOperator, OperatorKind, OperatorSpec};

pub const DEFAULT_MAX_POLICY_ITERATIONS: usize = 200;

#[derive(Debug, Clone)]
pub struct SolutionField {
    /// Values at interior nodes.
    pub values: Vec<f64>,
    /// Dirichlet data at the grid's cut points.
    pub cut_data: Vec<f64>,
    /// Relative residual of the final linear solve.
    pub residual: f64,
    /// Policy iterations (1 for linear solves).
    pub iterations: usize,
    /// Converged per-node control index (Bellman only).
    pub policy: Option<Vec<usize>>,
    /// `max_n |F(U)_n|` after each policy iteration (Bellman only).
    pub residual_history: Vec<f64>,
}

impl SolutionField {
    /// Bilinear evaluation at an interior point.
    pub fn eval(&self, grid: &DomainGrid, p: Point) -> Result<f64> {
        let st = grid.bilinear(p).ok_or_else(|| {
            Error::Input(format!("point {p:?} is not inside an interior grid cell"))
        })?;
        Ok(st.iter().map(|&(n, w)| w * self.values[n]).sum())
    }
}

fn sparse_matrix(grid: &DomainGrid, st: &ControlStencil) -> Result<SparseColMat<usize, f64>> {
    let mut trip = Vec::with_capacity(5 * grid.len());
    for (n, node) in grid.nodes().iter().enumerate() {
        trip.push(Triplet::new(n, n, st.diagonal(n)));
        for (a, arm) in node.arms.iter().enumerate() {
            if let Arm::Node(m) = *arm {
                trip.push(Triplet::new(n, m, st.coef[n][a]));
            }
        }
    }
    SparseColMat::try_new_from_triplets(grid.len(), grid.len(), &trip)
        .map_err(|e| Error::Solver(format!("matrix assembly failed: {e:?}")))
}

/// A factorized frozen-coefficient system `A U = b` on the interior nodes.
pub struct LinearSystem {
    stencil: ControlStencil,
    lu: Lu<usize, f64>,
    matrix: SparseColMat<usize, f64>,
}

impl LinearSystem {
    pub fn new(
        grid: &DomainGrid,
        stencil: ControlStencil,
        symbolic: Option<&SymbolicLu<usize>>,
    ) -> Result<Self> {
        let matrix = sparse_matrix(grid, &stencil)?;
        let symbolic = match symbolic {
            Some(s) => s.clone(),
            None => SymbolicLu::try_new(matrix.symbolic())
                .map_err(|e| Error::Solver(format!("symbolic factorization failed: {e:?}")))?,
        };
        let lu = Lu::try_new_with_symbolic(symbolic, matrix.as_ref())
            .map_err(|e| Error::Solver(format!("numeric factorization failed: {e:?}")))?;
        Ok(Self {
            stencil,
            lu,
            matrix,
        })
    }

    pub fn symbolic(grid: &DomainGrid, stencil: &ControlStencil) -> Result<SymbolicLu<usize>> {
        let matrix = sparse_matrix(grid, stencil)?;
        SymbolicLu::try_new(matrix.symbolic())
            .map_err(|e| Error::Solver(format!("symbolic factorization failed: {e:?}")))
    }

    pub fn stencil(&self) -> &ControlStencil {
        &self.stencil
    }

    /// Right-hand side moving cut-point data across: `b_n = -Σ_cut c·g`.
    pub fn boundary_rhs(&self, grid: &DomainGrid, g: &[f64]) -> Vec<f64> {
        grid.nodes()
            .iter()
            .enumerate()
            .map(|(n, node)| {
                let mut b = 0.0;
                for (a, arm) in node.arms.iter().enumerate() {
                    if let Arm::Cut { point, .. } = *arm {
                        b -= self.stencil.coef[n][a] * g[point];
                    }
                }
                b
            })
            .collect()
    }

    /// Solves in place for a column-major block of `cols` right-hand sides.
    pub fn solve_block(&self, rhs: &mut [f64], cols: usize) {
        let n = self.matrix.nrows();
        let m = MatMut::from_column_major_slice_mut(rhs, n, cols);
        self.lu.solve_in_place(m);
    }

    pub fn solve_rhs(&self, rhs: &[f64]) -> (Vec<f64>, f64) {
        let mut x = rhs.to_vec();
        self.solve_block(&mut x, 1);
        // One step of iterative refinement.
        let r = self.residual_vector(&x, rhs);
        let mut dx = r.clone();
        self.solve_block(&mut dx, 1);
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
        }
        let r = self.residual_vector(&x, rhs);
        let num = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let den = rhs
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(self.scale() * x.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        (x, if den > 0.0 { num / den } else { 0.0 })
    }

    fn scale(&self) -> f64 {
        self.stencil
            .coef
            .iter()
            .map(|c| c.iter().sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `b - A x`.
    fn residual_vector(&self, x: &[f64], b: &[f64]) -> Vec<f64> {
        let mut r = b.to_vec();
        let a = self.matrix.as_ref();
        for j in 0..a.ncols() {
            let xj = x[j];
            for (i, v) in a.row_idx_of_col(j).zip(a.val_of_col(j)) {
                r[i] -= v * xj;
            }
        }
        r
    }

    pub fn solve_dirichlet(&self, grid: &DomainGrid, g: &[f64]) -> SolutionField {
        let rhs = self.boundary_rhs(grid, g);
        let (values, residual) = self.solve_rhs(&rhs);
        SolutionField {
            values,
            cut_data: g.to_vec(),
            residual,
            iterations: 1,
            policy: None,
            residual_history: Vec::new(),
        }
    }
}

/// Solver context for one operator on one grid.
pub struct EllipticSolver<'g> {
    grid: &'g DomainGrid,
    op: DiscreteOperator,
    symbolic: SymbolicLu<usize>,
    /// Factorization of the linear operator (linear kinds only).
    linear: Option<LinearSystem>,
    pub max_iterations: usize,
}

impl<'g> EllipticSolver<'g> {
    pub fn new(spec: &OperatorSpec, grid: &'g DomainGrid) -> Result<Self> {
        let op = DiscreteOperator::assemble(spec, grid)?;
        let symbolic = LinearSystem::symbolic(grid, &op.controls[0])?;
        let linear = if spec.kind.is_linear() {
            Some(LinearSystem::new(
                grid,
                op.controls[0].clone(),
                Some(&symbolic),
            )?)
        } else {
            None
        };
        Ok(Self {
            grid,
            op,
            symbolic,
            linear,
            max_iterations: DEFAULT_MAX_POLICY_ITERATIONS,
        })
    }

    pub fn grid(&self) -> &'g DomainGrid {
        self.grid
    }

    pub fn operator(&self) -> &DiscreteOperator {
        &self.op
    }

    pub fn kind(&self) -> OperatorKind {
        self.op.kind
    }

    pub fn linear_system(&self) -> Option<&LinearSystem> {
        self.linear.as_ref()
    }

    /// Factorizes the frozen-policy operator.
    pub fn frozen_system(&self, policy: &[usize]) -> Result<LinearSystem> {
        LinearSystem::new(self.grid, self.op.frozen(policy), Some(&self.symbolic))
    }

    /// Solves with data given at the cut points.
    pub fn solve_cuts(&self, g: &[f64]) -> Result<SolutionField> {
        match &self.linear {
            Some(sys) => {
                let sol = sys.solve_dirichlet(self.grid, g);
                if !(sol.residual <= 1e-10) {
                    return Err(Error::Solver(format!(
                        "relative residual {} above 1e-10",
                        sol.residual
                    )));
                }
                Ok(sol)
            }
            None => self.policy_iteration(g, None),
        }
    }

    pub fn solve_nodal(&self, bgrid: &BoundaryGrid, phi: &[f64]) -> Result<SolutionField> {
        self.solve_cuts(&self.grid.cut_values(bgrid, phi))
    }

    /// Howard's algorithm for `min_a L^a U = 0` (or `max`).
    pub fn policy_iteration(
        &self,
        g: &[f64],
        initial: Option<Vec<usize>>,
    ) -> Result<SolutionField> {
        let is_min = match self.op.kind {
            OperatorKind::BellmanMin => true,
            OperatorKind::BellmanMax => false,
            _ => {
                return Err(Error::Input(
                    "policy iteration needs a Bellman operator".into(),
                ))
            }
        };
        let n = self.grid.len();
        let mut policy = initial.unwrap_or_else(|| vec![0; n]);
        let mut history = Vec::new();
        let gmax = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for it in 1..=self.max_iterations {
            let sys = self.frozen_system(&policy)?;
            let mut sol = sys.solve_dirichlet(self.grid, g);
            let u = &sol.values;
            let umax = u.iter().fold(gmax, |m, v| m.max(v.abs()));
            let mut changed = false;
            let mut worst = 0.0f64;
            for node in 0..n {
                let current = self.op.controls[policy[node]].apply_row(self.grid, node, u, g);
                let mut best = current;
                let mut best_a = policy[node];
                let scale = self.op.controls[policy[node]].coef[node]
                    .iter()
                    .sum::<f64>()
                    * umax;
                let tie = 1e-10 * scale;
                for (a, st) in self.op.controls.iter().enumerate() {
                    let v = st.apply_row(self.grid, node, u, g);
                    let better = if is_min {
                        v < best - tie
                    } else {
                        v > best + tie
                    };
                    if better {
                        best = v;
                        best_a = a;
                    }
                }
                worst = worst.max(best.abs());
                if best_a != policy[node] {
                    policy[node] = best_a;
                    changed = true;
                }
            }
            history.push(worst);
            if !changed {
                sol.iterations = it;
                sol.policy = Some(policy);
                sol.residual_history = history;
                return Ok(sol);
            }
        }
        Err(Error::Convergence {
            iterations: self.max_iterations,
            history,
        })
    }

    /// Discrete Green function `G(·, y)` for a linear operator: `-L G = δ_y`,
    /// with `δ_y = 1/h²` at node `y`, zero boundary data.
    pub fn green(&self, source: usize) -> Result<Vec<f64>> {
        let sys = self
            .linear
            .as_ref()
            .ok_or_else(|| Error::Input("Green function needs a linear operator".into()))?;
        if source >= self.grid.len() {
            return Err(Error::Input(format!(
                "source node {source} is not an interior node"
            )));
        }
        let mut rhs = vec![0.0; self.grid.len()];
        rhs[source] = -1.0 / (self.grid.h() * self.grid.h());
        Ok(sys.solve_rhs(&rhs).0)
    }

    pub fn green_at_point(&self, y: Point) -> Result<Vec<f64>> {
        let node = self
            .grid
            .nearest_node(y)
            .ok_or_else(|| Error::Input(format!("source point {y:?} is outside the interior")))?;
        self.green(node)
    }

    /// Harmonic measure `ω_x(S)` of a union of arcs `S = ∪ [a_k, b_k]`
    /// (arc-length intervals, taken counterclockwise).
    pub fn harmonic_measure(
        &self,
        bgrid: &BoundaryGrid,
        x: Point,
        arcs: &[(f64, f64)],
    ) -> Result<f64> {
        let phi = smoothed_indicator(bgrid, arcs);
        let sol = self.solve_nodal(bgrid, &phi)?;
        sol.eval(self.grid, x)
    }
}

/// Nodal indicator of a union of arcs with one-node ramps: each node gets
/// the fraction of its cell `[s_j - w/2, s_j + w/2]` covered by the arcs.
pub fn smoothed_indicator(bgrid: &BoundaryGrid, arcs: &[(f64, f64)]) -> Vec<f64> {
    let p = bgrid.perimeter();
    let w = bgrid.spacing();
    let mut phi = vec![0.0; bgrid.len()];
    for &(a, b) in arcs {
        let len = if b - a >= p * (1.0 - 1e-12) {
            p
        } else {
            (b - a).rem_euclid(p)
        };
        let start = a.rem_euclid(p);
        for (j, v) in phi.iter_mut().enumerate() {
            let c0 = bgrid.arc(j) - 0.5 * w;
            // Overlap of [c0, c0 + w] with [start, start + len] modulo p.
            let mut cover = 0.0;
            for shift in [-p, 0.0, p] {
                let lo = (start + shift).max(c0);
                let hi = (start + shift + len).min(c0 + w);
                if hi > lo {
                    cover += hi - lo;
                }
            }
            *v += cover / w;
        }
    }
    phi
}
