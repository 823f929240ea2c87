//! Closed planar boundary curves with arc-length geometry.
//!
//! A [`BoundaryCurve`] is a trigonometric polynomial `t ↦ γ(t)`, `t ∈ [0, 1)`,
//! oriented counterclockwise. Every public query is expressed in arc length
//! `s ∈ [0, P)`; the parameter `t` is an internal detail.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Minimum admissible `|γ'(t)|` relative to the mean speed.
const REGULARITY_FLOOR: f64 = 1e-6;
/// Samples used for simplicity and winding-number tests.
const POLYGON_SAMPLES: usize = 2048;

pub type Point = [f64; 2];

/// Built-in curve families plus raw coefficient input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CurveFamily {
    Circle {
        radius: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    Ellipse {
        semi_x: f64,
        semi_y: f64,
    },
    /// `r(θ) = 1 + amplitude·cos(lobes·θ)`.
    Star {
        amplitude: f64,
        lobes: usize,
    },
    /// `x(t) = Σ xc[k] cos(2πkt) + xs[k] sin(2πkt)`, likewise `y`.
    Fourier {
        x_cos: Vec<f64>,
        x_sin: Vec<f64>,
        y_cos: Vec<f64>,
        y_sin: Vec<f64>,
    },
}

impl CurveFamily {
    fn coefficients(&self) -> Result<TrigPoly2> {
        match *self {
            CurveFamily::Circle { radius, center } => {
                if !(radius > 0.0) {
                    return Err(Error::Geometry(format!(
                        "circle radius {radius} must be positive"
                    )));
                }
                Ok(TrigPoly2 {
                    x_cos: vec![center[0], radius],
                    x_sin: vec![0.0, 0.0],
                    y_cos: vec![center[1], 0.0],
                    y_sin: vec![0.0, radius],
                })
            }
            CurveFamily::Ellipse { semi_x, semi_y } => {
                if !(semi_x > 0.0 && semi_y > 0.0) {
                    return Err(Error::Geometry("ellipse semi-axes must be positive".into()));
                }
                Ok(TrigPoly2 {
                    x_cos: vec![0.0, semi_x],
                    x_sin: vec![0.0, 0.0],
                    y_cos: vec![0.0, 0.0],
                    y_sin: vec![0.0, semi_y],
                })
            }
            CurveFamily::Star { amplitude, lobes } => {
                if lobes < 2 || !(amplitude.abs() < 1.0) {
                    return Err(Error::Geometry(format!(
                        "star needs lobes >= 2 and |amplitude| < 1 (got {lobes}, {amplitude})"
                    )));
                }
                // (1 + a cos mθ)(cos θ, sin θ) expanded with product-to-sum.
                let m = lobes;
                let len = m + 2;
                let mut p = TrigPoly2 {
                    x_cos: vec![0.0; len],
                    x_sin: vec![0.0; len],
                    y_cos: vec![0.0; len],
                    y_sin: vec![0.0; len],
                };
                p.x_cos[1] += 1.0;
                p.y_sin[1] += 1.0;
                let half = 0.5 * amplitude;
                p.x_cos[m + 1] += half;
                p.x_cos[m - 1] += half;
                p.y_sin[m + 1] += half;
                if m - 1 > 0 {
                    p.y_sin[m - 1] -= half;
                }
                Ok(p)
            }
            CurveFamily::Fourier {
                ref x_cos,
                ref x_sin,
                ref y_cos,
                ref y_sin,
            } => {
                let len = x_cos
                    .len()
                    .max(x_sin.len())
                    .max(y_cos.len())
                    .max(y_sin.len());
                if len < 2 {
                    return Err(Error::Geometry(
                        "fourier curve needs at least one harmonic".into(),
                    ));
                }
                let pad = |v: &Vec<f64>| {
                    let mut out = v.clone();
                    out.resize(len, 0.0);
                    out
                };
                Ok(TrigPoly2 {
                    x_cos: pad(x_cos),
                    x_sin: pad(x_sin),
                    y_cos: pad(y_cos),
                    y_sin: pad(y_sin),
                })
            }
        }
    }
}

#[derive(Debug, Clone)]
struct TrigPoly2 {
    x_cos: Vec<f64>,
    x_sin: Vec<f64>,
    y_cos: Vec<f64>,
    y_sin: Vec<f64>,
}

impl TrigPoly2 {
    /// Returns `(γ, γ', γ'')` at parameter `t`, derivatives with respect to `t`.
    fn eval(&self, t: f64) -> (Point, Point, Point) {
        let mut v = [0.0; 2];
        let mut d1 = [0.0; 2];
        let mut d2 = [0.0; 2];
        for k in 0..self.x_cos.len() {
            let w = TAU * k as f64;
            let (s, c) = (w * t).sin_cos();
            let (xc, xs, yc, ys) = (self.x_cos[k], self.x_sin[k], self.y_cos[k], self.y_sin[k]);
            v[0] += xc * c + xs * s;
            v[1] += yc * c + ys * s;
            d1[0] += w * (-xc * s + xs * c);
            d1[1] += w * (-yc * s + ys * c);
            d2[0] -= w * w * (xc * c + xs * s);
            d2[1] -= w * w * (yc * c + ys * s);
        }
        (v, d1, d2)
    }

    fn reversed(&self) -> Self {
        Self {
            x_cos: self.x_cos.clone(),
            x_sin: self.x_sin.iter().map(|v| -v).collect(),
            y_cos: self.y_cos.clone(),
            y_sin: self.y_sin.iter().map(|v| -v).collect(),
        }
    }

    fn degree(&self) -> usize {
        self.x_cos.len() - 1
    }
}

/// A closed, simple, regular, counterclockwise planar curve.
#[derive(Debug, Clone)]
pub struct BoundaryCurve {
    family: CurveFamily,
    poly: TrigPoly2,
    perimeter: f64,
    /// Cumulative arc length at panel knots `t = k / panels`.
    knots: Vec<f64>,
    rule: GaussLegendre,
    r0: f64,
    max_curvature: f64,
    polygon: Vec<Point>,
}

impl BoundaryCurve {
    pub fn new(family: CurveFamily) -> Result<Self> {
        let mut poly = family.coefficients()?;
        let panels = (64 * poly.degree()).max(256);
        let rule = GaussLegendre::new(12);

        let signed_area = {
            let n = POLYGON_SAMPLES;
            (0..n)
                .map(|i| {
                    let (a, _, _) = poly.eval(i as f64 / n as f64);
                    let (b, _, _) = poly.eval((i + 1) as f64 / n as f64);
                    a[0] * b[1] - a[1] * b[0]
                })
                .sum::<f64>()
                * 0.5
        };
        if signed_area.abs() < 1e-14 {
            return Err(Error::Geometry("curve encloses no area".into()));
        }
        if signed_area < 0.0 {
            poly = poly.reversed();
        }

        let speed = |t: f64| {
            let (_, d, _) = poly.eval(t);
            d[0].hypot(d[1])
        };
        let mut knots = Vec::with_capacity(panels + 1);
        knots.push(0.0);
        let mut acc = 0.0;
        for k in 0..panels {
            let a = k as f64 / panels as f64;
            let b = (k + 1) as f64 / panels as f64;
            acc += rule.integrate(a, b, speed);
            knots.push(acc);
        }
        let perimeter = acc;

        let mean_speed = perimeter;
        let mut max_curvature: f64 = 0.0;
        for i in 0..(8 * panels) {
            let t = i as f64 / (8 * panels) as f64;
            let (_, d1, d2) = poly.eval(t);
            let sp = d1[0].hypot(d1[1]);
            if sp < REGULARITY_FLOOR * mean_speed {
                return Err(Error::Geometry(format!(
                    "curve is not regular near t = {t:.6}"
                )));
            }
            let kappa = (d1[0] * d2[1] - d1[1] * d2[0]) / sp.powi(3);
            max_curvature = max_curvature.max(kappa.abs());
        }

        let polygon: Vec<Point> = (0..POLYGON_SAMPLES)
            .map(|i| poly.eval(i as f64 / POLYGON_SAMPLES as f64).0)
            .collect();
        check_simple(&polygon)?;

        Ok(Self {
            family,
            poly,
            perimeter,
            knots,
            rule,
            r0: perimeter / 4.0,
            max_curvature,
            polygon,
        })
    }

    pub fn circle(radius: f64) -> Result<Self> {
        Self::new(CurveFamily::Circle {
            radius,
            center: [0.0, 0.0],
        })
    }

    pub fn unit_disk() -> Self {
        Self::circle(1.0).expect("unit circle is valid")
    }

    pub fn ellipse(semi_x: f64, semi_y: f64) -> Result<Self> {
        Self::new(CurveFamily::Ellipse { semi_x, semi_y })
    }

    pub fn star(amplitude: f64, lobes: usize) -> Result<Self> {
        Self::new(CurveFamily::Star { amplitude, lobes })
    }

    /// Overrides the truncation radius `r₀` (default `P/4`).
    pub fn with_r0(mut self, r0: f64) -> Result<Self> {
        if !(r0 > 0.0 && r0 <= 0.5 * self.perimeter) {
            return Err(Error::Input(format!(
                "r0 = {r0} must lie in (0, P/2] with P = {}",
                self.perimeter
            )));
        }
        self.r0 = r0;
        Ok(self)
    }

    pub fn family(&self) -> &CurveFamily {
        &self.family
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn max_curvature(&self) -> f64 {
        self.max_curvature
    }

    /// Largest Fourier degree of the parametrization.
    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    /// Arc length from `t = 0` to parameter `t ∈ [0, 1]`.
    pub fn arc_length_at(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        let panels = self.knots.len() - 1;
        let k = ((t * panels as f64).floor() as usize).min(panels - 1);
        let a = k as f64 / panels as f64;
        self.knots[k] + self.rule.integrate(a, t, |u| self.speed(u))
    }

    /// Parameter `t` at arc length `s` (reduced modulo `P`).
    pub fn parameter_at(&self, s: f64) -> f64 {
        let s = self.wrap(s);
        let panels = self.knots.len() - 1;
        let k = match self.knots.binary_search_by(|v| v.partial_cmp(&s).unwrap()) {
            Ok(i) => return i as f64 / panels as f64,
            Err(i) => i.saturating_sub(1).min(panels - 1),
        };
        let (a, b) = (k as f64 / panels as f64, (k + 1) as f64 / panels as f64);
        let (sa, sb) = (self.knots[k], self.knots[k + 1]);
        let mut t = a + (b - a) * (s - sa) / (sb - sa);
        for _ in 0..50 {
            let f = self.knots[k] + self.rule.integrate(a, t, |u| self.speed(u)) - s;
            let step = f / self.speed(t);
            t = (t - step).clamp(a, b);
            if step.abs() < 1e-16 {
                break;
            }
        }
        t
    }

    fn speed(&self, t: f64) -> f64 {
        let (_, d, _) = self.poly.eval(t);
        d[0].hypot(d[1])
    }

    /// Point, unit tangent and signed curvature at parameter `t`.
    pub fn frame_at_parameter(&self, t: f64) -> (Point, Point, f64) {
        let (p, d1, d2) = self.poly.eval(t);
        let sp = d1[0].hypot(d1[1]);
        let kappa = (d1[0] * d2[1] - d1[1] * d2[0]) / sp.powi(3);
        (p, [d1[0] / sp, d1[1] / sp], kappa)
    }

    pub fn point_at_parameter(&self, t: f64) -> Point {
        self.poly.eval(t).0
    }

    /// First derivative `γ'(t)`.
    pub fn velocity_at_parameter(&self, t: f64) -> Point {
        self.poly.eval(t).1
    }

    /// Boundary point and inward unit normal at arc length `s`.
    pub fn point_and_normal(&self, s: f64) -> Result<(Point, Point)> {
        if !s.is_finite() {
            return Err(Error::Geometry(format!("arc length {s} is not finite")));
        }
        let t = self.parameter_at(s);
        let (p, d1, _) = self.poly.eval(t);
        let sp = d1[0].hypot(d1[1]);
        if sp < REGULARITY_FLOOR * self.perimeter {
            return Err(Error::Geometry(format!("non-regular point at s = {s}")));
        }
        // Counterclockwise orientation: rotating the tangent by +90° points inward.
        Ok((p, [-d1[1] / sp, d1[0] / sp]))
    }

    pub fn curvature_at(&self, s: f64) -> f64 {
        self.frame_at_parameter(self.parameter_at(s)).2
    }

    /// Reduces an arc length to `[0, P)`.
    pub fn wrap(&self, s: f64) -> f64 {
        let r = s.rem_euclid(self.perimeter);
        if r >= self.perimeter {
            0.0
        } else {
            r
        }
    }

    /// Geodesic (intrinsic) distance along the curve.
    pub fn geodesic_distance(&self, s1: f64, s2: f64) -> f64 {
        periodic_distance(s1, s2, self.perimeter)
    }

    /// Signed arc-length offset from `x_s` to `h_s`, positive in the
    /// direction of increasing arc length.
    pub fn log_map(&self, x_s: f64, h_s: f64) -> Result<f64> {
        signed_offset(x_s, h_s, self.perimeter)
    }

    /// Moves `offset` along the curve from `x_s`.
    pub fn exp_map(&self, x_s: f64, offset: f64) -> f64 {
        self.wrap(x_s + offset)
    }

    /// Winding-number inside test against a dense polygonal approximation.
    pub fn contains(&self, p: Point) -> bool {
        winding_number(&self.polygon, p) != 0
    }

    /// Threshold below which arc/chord ratios on `B_{2r}` stay under 9/8.
    ///
    /// Chords of a curve with curvature bounded by `κ` dominate chords of the
    /// circle of curvature `κ`, so the circle bound `θ/sin θ ≤ 9/8` with
    /// `θ = κ r` transfers. Also capped at `P/4` so `2r` stays below `P/2`.
    pub fn annuli_threshold(&self) -> f64 {
        let theta = solve_theta_over_sin(9.0 / 8.0);
        (theta / self.max_curvature.max(1e-12)).min(0.25 * self.perimeter)
    }

    /// Max of `d(x,h)/|x-h|` over `h` with `d(x,h) ≤ 2r`.
    pub fn annuli_inclusion_check(&self, x_s: f64, r: f64) -> Result<AnnuliReport> {
        let eps0 = self.annuli_threshold();
        if !(r > 0.0) || r >= eps0 {
            return Err(Error::Precondition(format!(
                "radius {r} must lie in (0, eps0) with computed eps0 = {eps0}"
            )));
        }
        let samples = 400;
        let (x, _) = self.point_and_normal(x_s)?;
        let mut worst: f64 = 1.0;
        for k in 1..=samples {
            let d = 2.0 * r * k as f64 / samples as f64;
            for sign in [-1.0, 1.0] {
                let (h, _) = self.point_and_normal(x_s + sign * d)?;
                let chord = (x[0] - h[0]).hypot(x[1] - h[1]);
                worst = worst.max(d / chord);
            }
        }
        Ok(AnnuliReport {
            x_s,
            r,
            eps0,
            max_ratio: worst,
            pass: worst <= 9.0 / 8.0,
        })
    }

    pub fn build_boundary_grid(&self, nodes: usize) -> Result<BoundaryGrid> {
        BoundaryGrid::new(self, nodes)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnnuliReport {
    pub x_s: f64,
    pub r: f64,
    pub eps0: f64,
    pub max_ratio: f64,
    pub pass: bool,
}

/// Uniform arc-length sampling of a boundary curve.
#[derive(Debug, Clone)]
pub struct BoundaryGrid {
    perimeter: f64,
    s: Vec<f64>,
    points: Vec<Point>,
    normals: Vec<Point>,
    weight: f64,
}

impl BoundaryGrid {
    pub const MIN_NODES: usize = 4;

    pub fn new(curve: &BoundaryCurve, nodes: usize) -> Result<Self> {
        if nodes < Self::MIN_NODES {
            return Err(Error::Input(format!(
                "boundary grid needs at least {} nodes, got {nodes}",
                Self::MIN_NODES
            )));
        }
        let perimeter = curve.perimeter();
        let weight = perimeter / nodes as f64;
        let s: Vec<f64> = (0..nodes).map(|i| i as f64 * weight).collect();
        let mut points = Vec::with_capacity(nodes);
        let mut normals = Vec::with_capacity(nodes);
        for &si in &s {
            let (p, n) = curve.point_and_normal(si)?;
            points.push(p);
            normals.push(n);
        }
        Ok(Self {
            perimeter,
            s,
            points,
            normals,
            weight,
        })
    }

    /// Grid on a straight periodic boundary segment `[0, length)` at `y = 0`
    /// with normal `(0, 1)`.
    pub fn flat(length: f64, nodes: usize) -> Result<Self> {
        if nodes < Self::MIN_NODES || !(length > 0.0) {
            return Err(Error::Input(
                "flat boundary grid needs positive length and >= 4 nodes".into(),
            ));
        }
        let weight = length / nodes as f64;
        let s: Vec<f64> = (0..nodes).map(|i| i as f64 * weight).collect();
        let points = s.iter().map(|&x| [x, 0.0]).collect();
        let normals = vec![[0.0, 1.0]; nodes];
        Ok(Self {
            perimeter: length,
            s,
            points,
            normals,
            weight,
        })
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    pub fn spacing(&self) -> f64 {
        self.weight
    }

    pub fn weight(&self, _j: usize) -> f64 {
        self.weight
    }

    pub fn weights(&self) -> Vec<f64> {
        vec![self.weight; self.len()]
    }

    pub fn arc(&self, i: usize) -> f64 {
        self.s[i]
    }

    pub fn arcs(&self) -> &[f64] {
        &self.s
    }

    pub fn point(&self, i: usize) -> Point {
        self.points[i]
    }

    pub fn normal(&self, i: usize) -> Point {
        self.normals[i]
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        periodic_distance(self.s[i], self.s[j], self.perimeter)
    }

    /// Signed offset from node `i` to node `j`; errors for antipodal pairs.
    pub fn offset(&self, i: usize, j: usize) -> Result<f64> {
        signed_offset(self.s[i], self.s[j], self.perimeter)
    }

    /// Euclidean chord between nodes.
    pub fn chord(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.points[i], self.points[j]);
        (a[0] - b[0]).hypot(a[1] - b[1])
    }

    /// Samples a function of arc length at the nodes.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.s.iter().map(|&s| f(s)).collect()
    }

    /// Periodic cubic (Catmull-Rom) interpolation weights at arc length `s`.
    ///
    /// The interpolant is `C¹`, reproduces quadratics, and each nodal basis
    /// function is supported on two intervals to either side of its node.
    pub fn interpolation_weights(&self, s: f64) -> [(usize, f64); 4] {
        let n = self.len();
        let x = s.rem_euclid(self.perimeter) / self.weight;
        let k = (x.floor() as usize).min(n - 1);
        let u = (x - k as f64).clamp(0.0, 1.0);
        let (u2, u3) = (u * u, u * u * u);
        [
            ((k + n - 1) % n, 0.5 * (-u3 + 2.0 * u2 - u)),
            (k, 0.5 * (3.0 * u3 - 5.0 * u2 + 2.0)),
            ((k + 1) % n, 0.5 * (-3.0 * u3 + 4.0 * u2 + u)),
            ((k + 2) % n, 0.5 * (u3 - u2)),
        ]
    }

    pub fn interpolate(&self, values: &[f64], s: f64) -> f64 {
        self.interpolation_weights(s)
            .iter()
            .map(|&(j, w)| w * values[j])
            .sum()
    }

    /// Spectral derivative `dφ/ds` of periodic nodal data.
    pub fn spectral_derivative(&self, values: &[f64]) -> Vec<f64> {
        crate::spectral::periodic_derivative(values, self.perimeter)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["index", "s", "x", "y", "nu_x", "nu_y", "w"])?;
        for i in 0..self.len() {
            w.write_record(&[
                i.to_string(),
                fmt(self.s[i]),
                fmt(self.points[i][0]),
                fmt(self.points[i][1]),
                fmt(self.normals[i][0]),
                fmt(self.normals[i][1]),
                fmt(self.weight),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn fmt(v: f64) -> String {
    format!("{v:.17e}")
}

pub fn periodic_distance(s1: f64, s2: f64, period: f64) -> f64 {
    let d = (s1 - s2).rem_euclid(period);
    d.min(period - d)
}

pub fn signed_offset(from: f64, to: f64, period: f64) -> Result<f64> {
    let mut d = (to - from).rem_euclid(period);
    if d > 0.5 * period {
        d -= period;
    }
    if (d.abs() - 0.5 * period).abs() <= 1e-12 * period {
        return Err(Error::Antipodal { distance: d.abs() });
    }
    Ok(d)
}

fn winding_number(poly: &[Point], p: Point) -> i32 {
    let n = poly.len();
    let mut wn = 0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let cross = (b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1]);
        if a[1] <= p[1] {
            if b[1] > p[1] && cross > 0.0 {
                wn += 1;
            }
        } else if b[1] <= p[1] && cross < 0.0 {
            wn -= 1;
        }
    }
    wn
}

fn check_simple(poly: &[Point]) -> Result<()> {
    let n = poly.len();
    let seg = |i: usize| (poly[i], poly[(i + 1) % n]);
    for i in 0..n {
        let (a, b) = seg(i);
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (c, d) = seg(j);
            if segments_cross(a, b, c, d) {
                return Err(Error::Geometry(format!(
                    "curve self-intersects between samples {i} and {j}"
                )));
            }
        }
    }
    Ok(())
}

fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let orient = |p: Point, q: Point, r: Point| {
        (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    };
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

/// Solves `θ / sin θ = target` for `θ ∈ (0, π)`.
fn solve_theta_over_sin(target: f64) -> f64 {
    let (mut lo, mut hi) = (1e-9, PI - 1e-9);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid / mid.sin() < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn circle_point_and_normal() {
        let c = BoundaryCurve::unit_disk();
        let (p, n) = c.point_and_normal(0.0).unwrap();
        assert_abs_diff_eq!(p[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p[1], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(n[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(n[1], 0.0, epsilon = 1e-14);

        let (p, n) = c.point_and_normal(PI / 2.0).unwrap();
        assert_abs_diff_eq!(p[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p[1], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(n[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(n[1], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.perimeter(), TAU, epsilon = 1e-13);
    }

    #[test]
    fn ellipse_vertex_normal() {
        let c = BoundaryCurve::ellipse(2.0, 1.0).unwrap();
        let (p, n) = c.point_and_normal(0.0).unwrap();
        assert_abs_diff_eq!(p[0], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(n[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(n[1], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let cw = CurveFamily::Fourier {
            x_cos: vec![0.0, 1.0],
            x_sin: vec![0.0, 0.0],
            y_cos: vec![0.0, 0.0],
            y_sin: vec![0.0, -1.0],
        };
        let c = BoundaryCurve::new(cw).unwrap();
        let (_, n) = c.point_and_normal(0.0).unwrap();
        assert_abs_diff_eq!(n[0], -1.0, epsilon = 1e-14);
    }

    #[test]
    fn self_intersecting_curve_is_rejected() {
        // Figure-eight: x = sin 2πt·cos 2πt, y = sin 2πt.
        let fig8 = CurveFamily::Fourier {
            x_cos: vec![0.0, 0.0, 0.0],
            x_sin: vec![0.0, 0.0, 0.5],
            y_cos: vec![0.0, 0.0, 0.0],
            y_sin: vec![0.0, 1.0, 0.0],
        };
        assert!(BoundaryCurve::new(fig8).is_err());
    }

    #[test]
    fn log_map_conventions() {
        let c = BoundaryCurve::unit_disk();
        assert_abs_diff_eq!(c.log_map(0.0, PI / 2.0).unwrap(), PI / 2.0, epsilon = 1e-14);
        assert_eq!(c.log_map(1.0, 1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(c.log_map(0.0, c.wrap(-0.3)).unwrap(), -0.3, epsilon = 1e-14);
        assert!(matches!(c.log_map(0.0, PI), Err(Error::Antipodal { .. })));
    }

    #[test]
    fn geodesic_distance_on_circle() {
        let c = BoundaryCurve::unit_disk();
        assert_abs_diff_eq!(
            c.geodesic_distance(0.0, PI / 2.0),
            PI / 2.0,
            epsilon = 1e-15
        );
        assert_eq!(c.geodesic_distance(2.0, 2.0), 0.0);
        assert_abs_diff_eq!(c.geodesic_distance(0.1, TAU - 0.1), 0.2, epsilon = 1e-12);
    }

    #[test]
    fn annuli_ratio_on_circle_matches_chord_formula() {
        let c = BoundaryCurve::unit_disk();
        let rep = c.annuli_inclusion_check(0.0, PI / 6.0).unwrap();
        let expected = (PI / 3.0) / (2.0 * (PI / 6.0).sin());
        assert_abs_diff_eq!(rep.max_ratio, expected, epsilon = 1e-12);
        assert!(rep.pass);
    }

    #[test]
    fn annuli_check_rejects_large_radius() {
        let c = BoundaryCurve::ellipse(2.0, 1.0).unwrap();
        let eps0 = c.annuli_threshold();
        assert!(matches!(
            c.annuli_inclusion_check(0.0, eps0 * 1.01),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn boundary_grid_of_four_nodes() {
        let c = BoundaryCurve::unit_disk();
        let g = c.build_boundary_grid(4).unwrap();
        for (i, &s) in g.arcs().iter().enumerate() {
            assert_abs_diff_eq!(s, i as f64 * PI / 2.0, epsilon = 1e-13);
        }
        assert_abs_diff_eq!(g.weight(0), PI / 2.0, epsilon = 1e-14);
        assert!(c.build_boundary_grid(3).is_err());
    }

    #[test]
    fn cubic_interpolation_reproduces_quadratics() {
        let g = BoundaryGrid::flat(16.0, 16).unwrap();
        for k in 0..100 {
            let s = 2.0 + k as f64 * 0.1;
            let w = g.interpolation_weights(s);
            assert_abs_diff_eq!(w.iter().map(|p| p.1).sum::<f64>(), 1.0, epsilon = 1e-14);
            let q = |x: f64| 0.3 * x * x - x + 2.0;
            let got: f64 = w.iter().map(|&(j, v)| v * q(g.arc(j))).sum();
            assert_abs_diff_eq!(got, q(s), epsilon = 1e-12);
        }
        let vals: Vec<f64> = (0..16).map(|i| i as f64).collect();
        assert_eq!(g.interpolate(&vals, g.arc(5)), 5.0);
    }
}
