//! Lévy-type representation of a discrete D-to-N matrix: jump kernel `K`,
//! drift `b` and zeroth-order term `c`, plus truncated total variation and
//! bump-function mass estimates.

use std::io::Write;

use serde::Serialize;

use crate::dtn::{DtNMatrix, DtnOperator};
use crate::error::{Error, Result};
use crate::geometry::{fmt, BoundaryGrid, Point};

/// Drift cutoff ramp width in boundary grid intervals (shrunk when needed to
/// keep the cutoff clear of the antipode).
pub const RAMP_INTERVALS: f64 = 2.0;

/// `C²` monotone step on `[0, 1]`: `x − sin(2πx)/2π`, whose derivative is a
/// raised cosine.
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        x - (std::f64::consts::TAU * x).sin() / std::f64::consts::TAU
    }
}

/// Plateau profile: 1 on `[a, b]`, 0 outside `(a0, b0)`, `C²` in between.
/// `a0 = a = -inf` gives a ball profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Profile {
    pub support: (f64, f64),
    pub plateau: (f64, f64),
}

impl Profile {
    pub fn eval(&self, d: f64) -> f64 {
        let (a0, b0) = self.support;
        let (a, b) = self.plateau;
        let rise = if a0.is_finite() {
            smooth_step((d - a0) / (a - a0))
        } else {
            1.0
        };
        rise * smooth_step((b0 - d) / (b0 - b))
    }
}

#[derive(Debug, Clone)]
pub struct LevyDecomposition {
    n: usize,
    /// Row-major `K(x_i, h_j)`; diagonal entries are zero and never reported.
    kernel: Vec<f64>,
    drift: Vec<f64>,
    zeroth: Vec<f64>,
    r0: f64,
    ramp: f64,
    bgrid: BoundaryGrid,
    pub h: f64,
    pub label: String,
}

impl LevyDecomposition {
    pub fn decompose(m: &DtNMatrix, r0: f64) -> Result<Self> {
        let bgrid = m.boundary_grid().clone();
        let n = bgrid.len();
        check_r0(&bgrid, r0)?;
        let ramp = ramp_width(&bgrid, r0);
        let mut kernel = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    kernel[i * n + j] = m.get(i, j) / bgrid.weight(j);
                }
            }
        }
        let zeroth = m.row_sums();
        let mut dec = Self {
            n,
            kernel,
            drift: vec![0.0; n],
            zeroth,
            r0,
            ramp,
            bgrid,
            h: m.h,
            label: m.label.clone(),
        };
        dec.drift = dec.drift_for(r0)?;
        Ok(dec)
    }

    /// Same kernel with a different truncation radius.
    pub fn with_r0(&self, r0: f64) -> Result<Self> {
        check_r0(&self.bgrid, r0)?;
        let mut out = self.clone();
        out.r0 = r0;
        out.ramp = ramp_width(&self.bgrid, r0);
        out.drift = out.drift_for(r0)?;
        Ok(out)
    }

    fn cutoff(&self, r0: f64, d: f64) -> f64 {
        smooth_step((r0 + self.ramp - d) / self.ramp)
    }

    fn drift_for(&self, r0: f64) -> Result<Vec<f64>> {
        (0..self.n)
            .map(|i| {
                let mut b = 0.0;
                for j in 0..self.n {
                    if j == i {
                        continue;
                    }
                    let eta = self.cutoff(r0, self.bgrid.distance(i, j));
                    if eta > 0.0 {
                        b += self.mass(i, j) * eta * self.bgrid.offset(i, j)?;
                    }
                }
                Ok(b)
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn boundary_grid(&self) -> &BoundaryGrid {
        &self.bgrid
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn ramp(&self) -> f64 {
        self.ramp
    }

    /// `K(x_i, h_j)`; `None` on the diagonal.
    pub fn kernel(&self, i: usize, j: usize) -> Option<f64> {
        (i != j).then(|| self.kernel[i * self.n + j])
    }

    /// Discrete jump mass `K(x_i, h_j)·w_j`.
    fn mass(&self, i: usize, j: usize) -> f64 {
        self.kernel[i * self.n + j] * self.bgrid.weight(j)
    }

    pub fn drift(&self) -> &[f64] {
        &self.drift
    }

    pub fn zeroth(&self) -> &[f64] {
        &self.zeroth
    }

    /// Most negative off-diagonal kernel value (0 if none is negative).
    pub fn min_kernel(&self) -> f64 {
        (0..self.n)
            .flat_map(|i| (0..self.n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| self.kernel[i * self.n + j])
            .fold(0.0, f64::min)
    }

    /// Evaluates the representation
    /// `c φ(x) + b φ'(x) + Σ (φ(h) − φ(x) − 1_{d≤r₀} φ'(x) log_x h) K w`
    /// plus the cutoff-ramp term, which together equal `M φ` exactly.
    pub fn reconstruct_action(&self, phi: &[f64]) -> Result<Vec<f64>> {
        if phi.len() != self.n {
            return Err(Error::Input(format!(
                "boundary vector has length {}, decomposition has {} nodes",
                phi.len(),
                self.n
            )));
        }
        let dphi = self.bgrid.spectral_derivative(phi);
        (0..self.n)
            .map(|i| {
                let mut jump = 0.0;
                let mut ramp = 0.0;
                for j in 0..self.n {
                    if j == i {
                        continue;
                    }
                    let d = self.bgrid.distance(i, j);
                    let m = self.mass(i, j);
                    let mut term = phi[j] - phi[i];
                    if d <= self.r0 {
                        term -= dphi[i] * self.bgrid.offset(i, j)?;
                    } else {
                        let eta = self.cutoff(self.r0, d);
                        if eta > 0.0 {
                            ramp -= m * eta * self.bgrid.offset(i, j)? * dphi[i];
                        }
                    }
                    jump += term * m;
                }
                Ok(self.zeroth[i] * phi[i] + self.drift[i] * dphi[i] + jump + ramp)
            })
            .collect()
    }

    /// Total variation of the difference of the measures truncated to
    /// `d > δ` around `x_i` and `x_j`.
    pub fn tv_distance(&self, i: usize, j: usize, delta: f64) -> Result<f64> {
        if !(delta > 2.0 * self.bgrid.spacing()) {
            return Err(Error::Resolution(format!(
                "truncation radius {delta} must exceed two boundary intervals ({})",
                2.0 * self.bgrid.spacing()
            )));
        }
        let part = |x: usize, k: usize| {
            if k != x && self.bgrid.distance(x, k) > delta {
                self.kernel[x * self.n + k]
            } else {
                0.0
            }
        };
        Ok((0..self.n)
            .map(|k| (part(i, k) - part(j, k)).abs() * self.bgrid.weight(k))
            .sum())
    }

    /// Kernel table `(s_i, s_j, d, chord, K, K_d2)` for pairs with `d ≥ d_min`.
    pub fn write_kernel_csv<W: Write>(&self, out: W, d_min: f64) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["s_i", "s_j", "d", "chord", "K", "K_d2"])?;
        for i in 0..self.n {
            for j in 0..self.n {
                let d = self.bgrid.distance(i, j);
                if i == j || d < d_min {
                    continue;
                }
                let k = self.kernel[i * self.n + j];
                w.write_record([
                    fmt(self.bgrid.arc(i)),
                    fmt(self.bgrid.arc(j)),
                    fmt(d),
                    fmt(self.bgrid.chord(i, j)),
                    fmt(k),
                    fmt(k * d * d),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_drift_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["s_i", "b", "c"])?;
        for i in 0..self.n {
            w.write_record([
                fmt(self.bgrid.arc(i)),
                fmt(self.drift[i]),
                fmt(self.zeroth[i]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_r0(bgrid: &BoundaryGrid, r0: f64) -> Result<()> {
    let half = 0.5 * bgrid.perimeter();
    if !(r0 > 0.0 && r0 < half) {
        return Err(Error::Input(format!(
            "truncation radius r0 = {r0} must lie in (0, {half})"
        )));
    }
    Ok(())
}

fn ramp_width(bgrid: &BoundaryGrid, r0: f64) -> f64 {
    (RAMP_INTERVALS * bgrid.spacing()).min(0.5 * (0.5 * bgrid.perimeter() - r0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    /// Boundary points within chord distance `radius` of node `center`.
    Ball { center: usize, radius: f64 },
    /// Boundary points at chord distance in `(r, 2r)` from the base node.
    Ring { radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Lower,
    Upper,
}

impl Region {
    /// Bump profile in chord distance from the region's centre.
    pub fn profile(&self, side: Side) -> Profile {
        match (*self, side) {
            (Region::Ring { radius: r }, Side::Lower) => Profile {
                support: (1.25 * r, 1.75 * r),
                plateau: (1.375 * r, 1.625 * r),
            },
            (Region::Ring { radius: r }, Side::Upper) => Profile {
                support: (0.625 * r, 2.375 * r),
                plateau: (0.75 * r, 2.25 * r),
            },
            (Region::Ball { radius: r, .. }, Side::Lower) => Profile {
                support: (f64::NEG_INFINITY, r),
                plateau: (f64::NEG_INFINITY, 0.5 * r),
            },
            (Region::Ball { radius: r, .. }, Side::Upper) => Profile {
                support: (f64::NEG_INFINITY, 1.25 * r),
                plateau: (f64::NEG_INFINITY, r),
            },
        }
    }
}

/// Anything that can be applied at a boundary node to data given pointwise.
pub trait BumpTarget {
    fn boundary_grid(&self) -> &BoundaryGrid;
    /// Smallest length scale the target resolves.
    fn resolution(&self) -> f64;
    fn apply_at(&self, i: usize, f: &dyn Fn(Point) -> f64) -> Result<f64>;
}

impl BumpTarget for DtNMatrix {
    fn boundary_grid(&self) -> &BoundaryGrid {
        DtNMatrix::boundary_grid(self)
    }

    fn resolution(&self) -> f64 {
        self.boundary_grid().spacing()
    }

    fn apply_at(&self, i: usize, f: &dyn Fn(Point) -> f64) -> Result<f64> {
        let b = DtNMatrix::boundary_grid(self);
        Ok(self
            .row(i)
            .iter()
            .enumerate()
            .map(|(j, m)| m * f(b.point(j)))
            .sum())
    }
}

impl BumpTarget for DtnOperator<'_> {
    fn boundary_grid(&self) -> &BoundaryGrid {
        DtnOperator::boundary_grid(self)
    }

    fn resolution(&self) -> f64 {
        self.grid().h()
    }

    fn apply_at(&self, i: usize, f: &dyn Fn(Point) -> f64) -> Result<f64> {
        let s = DtnOperator::boundary_grid(self).arc(i);
        self.evaluate_function_at(&|_, p| f(p), s)
    }
}

/// Operator applied at `x_i` to the lower or upper bump of `region`; by
/// monotonicity a lower or upper estimate of the region's jump mass.
pub fn bump_mass(target: &dyn BumpTarget, i: usize, region: Region, side: Side) -> Result<f64> {
    let bgrid = target.boundary_grid();
    let x = bgrid.point(i);
    let interval = target.resolution();
    let (centre, separation, radius) = match region {
        Region::Ring { radius } => (x, radius, radius),
        Region::Ball { center, radius } => {
            let c = bgrid.point(center);
            let gap = (c[0] - x[0]).hypot(c[1] - x[1]) - region.profile(Side::Upper).support.1;
            (c, gap, radius)
        }
    };
    let need = (0.5 * radius).max(3.0 * interval);
    if !(separation >= need) {
        return Err(Error::Precondition(format!(
            "region is {separation:.4e} from the base node; needs at least {need:.4e}"
        )));
    }
    let profile = region.profile(side);
    target.apply_at(i, &|p| {
        profile.eval((p[0] - centre[0]).hypot(p[1] - centre[1]))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(n: usize, f: impl Fn(usize, usize) -> f64) -> DtNMatrix {
        let b = BoundaryGrid::flat(n as f64, n).unwrap();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            let mut sum = 0.0;
            for j in 0..n {
                if i != j {
                    data[i * n + j] = f(i, j);
                    sum += f(i, j);
                }
            }
            data[i * n + i] = -sum;
        }
        DtNMatrix::from_rows(data, b, "toy", 1.0).unwrap()
    }

    #[test]
    fn smooth_step_is_c2_at_ends() {
        let e = 1e-4;
        assert_eq!(smooth_step(0.0), 0.0);
        assert_eq!(smooth_step(1.0), 1.0);
        // second difference ~ f''·e² must vanish faster than e²
        let d2 = smooth_step(2.0 * e) - 2.0 * smooth_step(e);
        assert!(d2.abs() < 1e-10);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn toy_tv_distance_by_hand() {
        // Eight nodes on a flat loop of length 8, unit weights. Far entries
        // are set by hand; near entries (d ≤ 2) are filler that truncation drops.
        let far = |i: usize, j: usize| match (i, j) {
            (0, 3) => 1.0,
            (0, 4) => 2.0,
            (0, 5) => 3.0,
            (1, 4) => 4.0,
            (1, 5) => 5.0,
            (1, 6) => 6.0,
            _ => 7.0,
        };
        let m = toy(8, far);
        let dec = LevyDecomposition::decompose(&m, 1.0).unwrap();
        assert_eq!(dec.kernel(0, 4), Some(2.0));
        assert_eq!(dec.kernel(1, 1), None);
        // |1-0| + |2-4| + |3-5| + |0-6|
        assert_eq!(dec.tv_distance(0, 1, 2.5).unwrap(), 11.0);
        assert_eq!(dec.tv_distance(1, 0, 2.5).unwrap(), 11.0);
        assert_eq!(dec.tv_distance(3, 3, 2.5).unwrap(), 0.0);
        assert!(matches!(
            dec.tv_distance(0, 1, 2.0),
            Err(Error::Resolution(_))
        ));
    }

    #[test]
    fn zeroth_order_is_row_sum() {
        let m = toy(12, |i, j| 1.0 / (1.0 + (i as f64 - j as f64).powi(2)));
        let dec = LevyDecomposition::decompose(&m, 3.0).unwrap();
        assert!(dec.zeroth().iter().all(|c| c.abs() < 1e-14));
        assert!(dec.min_kernel() >= 0.0);
    }

    #[test]
    fn bad_r0_is_rejected() {
        let m = toy(12, |_, _| 1.0);
        assert!(matches!(
            LevyDecomposition::decompose(&m, 6.0),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            LevyDecomposition::decompose(&m, 0.0),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn bump_profiles_are_nested() {
        let ring = Region::Ring { radius: 1.0 };
        let (lo, up) = (ring.profile(Side::Lower), ring.profile(Side::Upper));
        for k in 0..400 {
            let d = k as f64 * 0.01;
            let ind = if d > 1.0 && d < 2.0 { 1.0 } else { 0.0 };
            assert!(lo.eval(d) <= ind && ind <= up.eval(d), "d = {d}");
        }
        let ball = Region::Ball {
            center: 0,
            radius: 1.0,
        };
        let (lo, up) = (ball.profile(Side::Lower), ball.profile(Side::Upper));
        for k in 0..300 {
            let d = k as f64 * 0.01;
            let ind = if d < 1.0 { 1.0 } else { 0.0 };
            assert!(lo.eval(d) <= ind && ind <= up.eval(d), "d = {d}");
        }
    }
}
