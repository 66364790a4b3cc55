//! Gauss–Legendre radial rules, angular rules on the circle and sphere, and
//! boundary grids on `∂B_R`.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::context::{Dimension, WaveContext};
use crate::error::{Error, Result};

pub const DEFAULT_RADIAL_ORDER: usize = 64;
pub const DEFAULT_ANGULAR_COUNT_2D: usize = 256;
pub const DEFAULT_POLAR_COUNT_3D: usize = 32;
pub const DEFAULT_AZIMUTH_COUNT_3D: usize = 64;

/// Gauss–Legendre nodes (ascending) and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// One Gauss–Legendre panel of a composite radial rule.
#[derive(Debug, Clone)]
struct Panel {
    lo: f64,
    hi: f64,
    /// Offset of the panel's first node in the flattened node list.
    start: usize,
}

/// Composite Gauss–Legendre rule for `∫ g(r) dr` over `[0, b]`.
///
/// The measure `r^{d-1}` is applied by callers; the weights here integrate
/// plain `dr`.
#[derive(Debug, Clone)]
pub struct RadialRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    order: usize,
    panels: Vec<Panel>,
    /// Barycentric weights of the reference panel.
    bary: Vec<f64>,
    reference: Vec<f64>,
}

impl RadialRule {
    /// One panel per consecutive pair of `breaks` (strictly increasing, first >= 0).
    pub fn composite(breaks: &[f64], order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::param("radial_order", format!("must be at least 2, got {order}")));
        }
        if breaks.len() < 2 || breaks[0] < 0.0 || breaks.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("breakpoints", "must be non-negative and strictly increasing"));
        }
        let (x, w) = gauss_legendre(order);
        let bary: Vec<f64> = x
            .iter()
            .zip(&w)
            .enumerate()
            .map(|(j, (xj, wj))| {
                let s = ((1.0 - xj * xj) * wj).sqrt();
                if j % 2 == 0 {
                    s
                } else {
                    -s
                }
            })
            .collect();
        let mut nodes = Vec::with_capacity(order * (breaks.len() - 1));
        let mut weights = Vec::with_capacity(nodes.capacity());
        let mut panels = Vec::new();
        for pair in breaks.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            panels.push(Panel {
                lo,
                hi,
                start: nodes.len(),
            });
            for (xj, wj) in x.iter().zip(&w) {
                nodes.push(mid + half * xj);
                weights.push(half * wj);
            }
        }
        Ok(Self {
            nodes,
            weights,
            order,
            panels,
            bary,
            reference: x,
        })
    }

    /// `panels` equal panels on `[0, b]`.
    pub fn uniform(b: f64, panels: usize, order: usize) -> Result<Self> {
        if panels == 0 {
            return Err(Error::param("radial_panels", "must be at least 1"));
        }
        let breaks: Vec<f64> = (0..=panels).map(|k| b * k as f64 / panels as f64).collect();
        Self::composite(&breaks, order)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Points per panel.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Right end of the covered interval.
    pub fn upper(&self) -> f64 {
        self.panels.last().map_or(0.0, |p| p.hi)
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut g: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&r, &w)| w * g(r)).sum()
    }

    /// Barycentric interpolation of node `values` at `r`, using the panel that
    /// contains `r` (the outermost panel is used for extrapolation).
    pub fn interpolate(&self, values: &[Complex64], r: f64) -> Complex64 {
        let p = self
            .panels
            .iter()
            .find(|p| r <= p.hi)
            .unwrap_or_else(|| self.panels.last().expect("rule has a panel"));
        let t = (2.0 * r - p.lo - p.hi) / (p.hi - p.lo);
        let local = &values[p.start..p.start + self.order];
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = 0.0;
        for ((&xj, &bj), &vj) in self.reference.iter().zip(&self.bary).zip(local) {
            let diff = t - xj;
            if diff == 0.0 {
                return vj;
            }
            let c = bj / diff;
            num += c * vj;
            den += c;
        }
        num / den
    }
}

/// Single-panel Gauss–Legendre rule on `[0, R]`.
pub fn radial_rule(ctx: &WaveContext, order: usize) -> Result<RadialRule> {
    RadialRule::composite(&[0.0, ctx.radius()], order)
}

/// Quadrature on the unit circle (equispaced trapezoid) or unit sphere
/// (Gauss in `cos θ` times equispaced `φ`).
#[derive(Debug, Clone)]
pub struct AngularRule {
    directions: Vec<Vec<f64>>,
    weights: Vec<f64>,
    /// `(θ)` in 2D, `(θ, φ)` in 3D, parallel to `directions`.
    angles: Vec<(f64, f64)>,
    polar_count: usize,
    azimuth_count: usize,
}

impl AngularRule {
    /// `count` equispaced angles `2πj/count` with weight `2π/count`.
    pub fn circle(count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::param("angular_count", "must be positive"));
        }
        let h = 2.0 * PI / count as f64;
        let mut directions = Vec::with_capacity(count);
        let mut angles = Vec::with_capacity(count);
        for j in 0..count {
            let t = h * j as f64;
            directions.push(vec![t.cos(), t.sin()]);
            angles.push((t, 0.0));
        }
        Ok(Self {
            directions,
            weights: vec![h; count],
            angles,
            polar_count: 1,
            azimuth_count: count,
        })
    }

    /// Product rule with `polar_count` Gauss nodes in `cos θ` (descending θ
    /// order reversed, so θ increases) and `azimuth_count` equispaced `φ`.
    pub fn sphere(polar_count: usize, azimuth_count: usize) -> Result<Self> {
        if polar_count == 0 || azimuth_count == 0 {
            return Err(Error::param("angular_count", "polar and azimuth counts must be positive"));
        }
        let (x, w) = gauss_legendre(polar_count);
        let h = 2.0 * PI / azimuth_count as f64;
        let mut directions = Vec::with_capacity(polar_count * azimuth_count);
        let mut weights = Vec::with_capacity(directions.capacity());
        let mut angles = Vec::with_capacity(directions.capacity());
        for (ct, wt) in x.iter().rev().zip(w.iter().rev()) {
            let st = (1.0 - ct * ct).sqrt();
            let theta = ct.acos();
            for k in 0..azimuth_count {
                let phi = h * k as f64;
                directions.push(vec![st * phi.cos(), st * phi.sin(), *ct]);
                weights.push(wt * h);
                angles.push((theta, phi));
            }
        }
        Ok(Self {
            directions,
            weights,
            angles,
            polar_count,
            azimuth_count,
        })
    }

    /// Direction set with exactly `count` members: equispaced in 2D; in 3D a
    /// product grid whose polar count is the largest divisor of `count` not
    /// exceeding `sqrt(count / 2)`.
    pub fn with_count(dimension: Dimension, count: usize) -> Result<Self> {
        match dimension {
            Dimension::Two => Self::circle(count),
            Dimension::Three => {
                if count == 0 {
                    return Err(Error::param("direction_count", "must be positive"));
                }
                let limit = ((count as f64 / 2.0).sqrt().floor() as usize).max(1);
                let polar = (1..=limit).rev().find(|d| count % d == 0).unwrap_or(1);
                Self::sphere(polar, count / polar)
            }
        }
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn angles(&self) -> &[(f64, f64)] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn polar_count(&self) -> usize {
        self.polar_count
    }

    pub fn azimuth_count(&self) -> usize {
        self.azimuth_count
    }
}

/// Tensor product of a radial rule and an angular rule over a ball, with the
/// `r^{d-1}` Jacobian folded into [`ProductRule::weight`].
#[derive(Debug, Clone)]
pub struct ProductRule {
    dimension: Dimension,
    radial: RadialRule,
    angular: AngularRule,
}

impl ProductRule {
    pub fn new(dimension: Dimension, radial: RadialRule, angular: AngularRule) -> Self {
        Self {
            dimension,
            radial,
            angular,
        }
    }

    pub fn radial(&self) -> &RadialRule {
        &self.radial
    }

    pub fn angular(&self) -> &AngularRule {
        &self.angular
    }

    pub fn len(&self) -> usize {
        self.radial.len() * self.angular.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Point with radial index `i` and angular index `j`.
    pub fn point(&self, i: usize, j: usize) -> Vec<f64> {
        let r = self.radial.nodes()[i];
        self.angular.directions()[j].iter().map(|c| r * c).collect()
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let r = self.radial.nodes()[i];
        let jac = match self.dimension {
            Dimension::Two => r,
            Dimension::Three => r * r,
        };
        self.radial.weights()[i] * jac * self.angular.weights()[j]
    }

    /// Deterministic, ordered sum of `w · g(x)` over all nodes.
    pub fn integrate<F>(&self, mut g: F) -> Result<Complex64>
    where
        F: FnMut(&[f64]) -> Result<Complex64>,
    {
        let mut total = Complex64::new(0.0, 0.0);
        for i in 0..self.radial.len() {
            for j in 0..self.angular.len() {
                total += self.weight(i, j) * g(&self.point(i, j))?;
            }
        }
        Ok(total)
    }
}

/// `∫_{B_R} g` over the disk (2D) or ball (3D, `angular_count` azimuths and
/// half as many polar nodes).
pub fn disk_integrate<F>(ctx: &WaveContext, g: F, radial_order: usize, angular_count: usize) -> Result<Complex64>
where
    F: FnMut(&[f64]) -> Result<Complex64>,
{
    let radial = radial_rule(ctx, radial_order)?;
    let angular = match ctx.dimension() {
        Dimension::Two => AngularRule::circle(angular_count)?,
        Dimension::Three => AngularRule::sphere((angular_count / 2).max(1), angular_count)?,
    };
    ProductRule::new(ctx.dimension(), radial, angular).integrate(g)
}

/// `∫_{B_R} g` over the ball with explicit polar and azimuthal counts.
pub fn ball_integrate<F>(
    ctx: &WaveContext,
    g: F,
    radial_order: usize,
    polar_count: usize,
    azimuth_count: usize,
) -> Result<Complex64>
where
    F: FnMut(&[f64]) -> Result<Complex64>,
{
    if ctx.dimension() != Dimension::Three {
        return Err(Error::Precondition("ball_integrate needs a 3D context".into()));
    }
    let radial = radial_rule(ctx, radial_order)?;
    let angular = AngularRule::sphere(polar_count, azimuth_count)?;
    ProductRule::new(Dimension::Three, radial, angular).integrate(g)
}

/// Nodes on `∂B_R` with outward normals and surface weights.
#[derive(Debug, Clone)]
pub struct BoundaryGrid {
    radius: f64,
    angular: AngularRule,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl BoundaryGrid {
    pub fn new(radius: f64, angular: AngularRule) -> Self {
        let dim = angular.directions().first().map_or(2, Vec::len);
        let scale = if dim == 2 { radius } else { radius * radius };
        let points = angular
            .directions()
            .iter()
            .map(|d| d.iter().map(|c| radius * c).collect())
            .collect();
        let weights = angular.weights().iter().map(|w| w * scale).collect();
        Self {
            radius,
            angular,
            points,
            weights,
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// Outward unit normals (the directions of the points).
    pub fn normals(&self) -> &[Vec<f64>] {
        self.angular.directions()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn angles(&self) -> &[(f64, f64)] {
        self.angular.angles()
    }

    pub fn angular(&self) -> &AngularRule {
        &self.angular
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Boundary grid with `resolution` nodes in 2D, or `resolution` azimuths by
/// `resolution / 2` Gauss polar nodes in 3D.
pub fn boundary_grid(ctx: &WaveContext, resolution: usize) -> Result<BoundaryGrid> {
    if resolution < 8 {
        return Err(Error::param("resolution", format!("must be at least 8, got {resolution}")));
    }
    let angular = match ctx.dimension() {
        Dimension::Two => AngularRule::circle(resolution)?,
        Dimension::Three => AngularRule::sphere(resolution / 2, resolution)?,
    };
    Ok(BoundaryGrid::new(ctx.radius(), angular))
}
