//! Compactly supported sources: pointwise, modal and grid-sampled
//! representations, angular projection onto modes, and the explicit
//! nonradiating constructions.

use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::context::{azimuth, norm, Dimension, WaveContext};
use crate::error::{Error, Result};
use crate::quadrature::{
    AngularRule, ProductRule, RadialRule, DEFAULT_ANGULAR_COUNT_2D, DEFAULT_AZIMUTH_COUNT_3D, DEFAULT_POLAR_COUNT_3D,
    DEFAULT_RADIAL_ORDER,
};
use crate::specfun::{
    bessel_j0_zero, bessel_j_seq, legendre_normalized, sph_bessel_j_seq, ModeIndex2D, ModeIndex3D, SphHarmonicTable,
};

pub type PointFn = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;
pub type RadialFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// A radial profile `r ↦ f_n(r)` (or `f_n^m(r)`).
#[derive(Clone)]
pub struct RadialProfile(RadialFn);

impl RadialProfile {
    pub fn analytic<F>(f: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Self(Arc::new(f))
    }

    /// Profile known at the nodes of `rule`, interpolated barycentrically in between.
    pub fn sampled(rule: Arc<RadialRule>, values: Vec<Complex64>) -> Self {
        Self(Arc::new(move |r| rule.interpolate(&values, r)))
    }

    pub fn eval(&self, r: f64) -> Complex64 {
        (self.0)(r)
    }

    fn scaled(&self, c: Complex64) -> Self {
        let f = self.0.clone();
        Self(Arc::new(move |r| c * f(r)))
    }

    fn plus(&self, other: &Self) -> Self {
        let (a, b) = (self.0.clone(), other.0.clone());
        Self(Arc::new(move |r| a(r) + b(r)))
    }
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("RadialProfile(..)")
    }
}

/// Angular modes of a source with their radial profiles.
#[derive(Debug, Clone)]
pub enum ModalProfiles {
    Cylindrical(BTreeMap<ModeIndex2D, RadialProfile>),
    Spherical(BTreeMap<ModeIndex3D, RadialProfile>),
}

impl ModalProfiles {
    fn empty(dimension: Dimension) -> Self {
        match dimension {
            Dimension::Two => Self::Cylindrical(BTreeMap::new()),
            Dimension::Three => Self::Spherical(BTreeMap::new()),
        }
    }

    /// Single radially symmetric mode carrying the pointwise profile `f(r)`.
    fn radial(dimension: Dimension, profile: RadialFn) -> Self {
        match dimension {
            Dimension::Two => {
                Self::Cylindrical(BTreeMap::from([(ModeIndex2D(0), RadialProfile(profile))]))
            }
            Dimension::Three => {
                // f = f_0^0 Y_0^0 with Y_0^0 = 1/sqrt(4π)
                let s = (4.0 * PI).sqrt();
                let p = RadialProfile(Arc::new(move |r| s * profile(r)));
                Self::Spherical(BTreeMap::from([(ModeIndex3D { n: 0, m: 0 }, p)]))
            }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Self::Cylindrical(m) => m.len(),
            Self::Spherical(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Largest `|n|` present.
    pub fn max_order(&self) -> usize {
        match self {
            Self::Cylindrical(m) => m.keys().map(|k| k.0.unsigned_abs() as usize).max().unwrap_or(0),
            Self::Spherical(m) => m.keys().map(|k| k.n as usize).max().unwrap_or(0),
        }
    }

    fn map_profiles(&self, f: impl Fn(&RadialProfile) -> RadialProfile) -> Self {
        match self {
            Self::Cylindrical(m) => Self::Cylindrical(m.iter().map(|(k, p)| (*k, f(p))).collect()),
            Self::Spherical(m) => Self::Spherical(m.iter().map(|(k, p)| (*k, f(p))).collect()),
        }
    }

    fn merged(&self, other: &Self) -> Result<Self> {
        fn merge<K: Ord + Copy>(
            a: &BTreeMap<K, RadialProfile>,
            b: &BTreeMap<K, RadialProfile>,
        ) -> BTreeMap<K, RadialProfile> {
            let mut out = a.clone();
            for (k, p) in b {
                let combined = match out.get(k) {
                    Some(q) => q.plus(p),
                    None => p.clone(),
                };
                out.insert(*k, combined);
            }
            out
        }
        match (self, other) {
            (Self::Cylindrical(a), Self::Cylindrical(b)) => Ok(Self::Cylindrical(merge(a, b))),
            (Self::Spherical(a), Self::Spherical(b)) => Ok(Self::Spherical(merge(a, b))),
            _ => Err(Error::Precondition("cannot combine sources of different dimension".into())),
        }
    }

    fn truncated(&self, truncation: usize) -> Self {
        match self {
            Self::Cylindrical(m) => Self::Cylindrical(
                m.iter()
                    .filter(|(k, _)| k.0.unsigned_abs() as usize <= truncation)
                    .map(|(k, p)| (*k, p.clone()))
                    .collect(),
            ),
            Self::Spherical(m) => Self::Spherical(
                m.iter()
                    .filter(|(k, _)| k.n as usize <= truncation)
                    .map(|(k, p)| (*k, p.clone()))
                    .collect(),
            ),
        }
    }

    fn synthesize(&self, x: &[f64]) -> Complex64 {
        let r = norm(x);
        match self {
            Self::Cylindrical(m) => {
                let theta = if r > 0.0 { azimuth(x) } else { 0.0 };
                m.iter()
                    .map(|(k, p)| p.eval(r) * Complex64::from_polar(1.0, k.0 as f64 * theta))
                    .sum()
            }
            Self::Spherical(m) => {
                if m.is_empty() {
                    return ZERO;
                }
                let nmax = m.keys().map(|k| k.n).max().unwrap_or(0);
                let table = if r > 0.0 {
                    SphHarmonicTable::for_direction(nmax, x)
                } else {
                    SphHarmonicTable::new(nmax, 0.0, 0.0)
                };
                m.iter().map(|(k, p)| p.eval(r) * table.get(k.n, k.m)).sum()
            }
        }
    }
}

/// Values of a source on the nodes of a product rule, radial-major.
#[derive(Debug, Clone)]
pub struct GridSamples {
    pub rule: ProductRule,
    pub values: Vec<Complex64>,
}

#[derive(Clone)]
pub enum SourceKind {
    Callable(PointFn),
    Modal(ModalProfiles),
    Grid(Arc<GridSamples>),
}

impl fmt::Debug for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Callable(_) => f.write_str("Callable(..)"),
            Self::Modal(m) => write!(f, "Modal({} modes)", m.len()),
            Self::Grid(g) => write!(f, "Grid({} nodes)", g.values.len()),
        }
    }
}

/// Quadrature resolution attached to a source.
///
/// The radial rule has `radial_panels` Gauss–Legendre panels of
/// `radial_order` points between each pair of consecutive breakpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Discretization {
    pub radial_order: usize,
    pub radial_panels: usize,
    pub angular_count: usize,
    pub polar_count: usize,
    pub azimuth_count: usize,
}

impl Default for Discretization {
    fn default() -> Self {
        Self {
            radial_order: DEFAULT_RADIAL_ORDER,
            radial_panels: 1,
            angular_count: DEFAULT_ANGULAR_COUNT_2D,
            polar_count: DEFAULT_POLAR_COUNT_3D,
            azimuth_count: DEFAULT_AZIMUTH_COUNT_3D,
        }
    }
}

impl Discretization {
    fn finest(&self, other: &Self) -> Self {
        Self {
            radial_order: self.radial_order.max(other.radial_order),
            radial_panels: self.radial_panels.max(other.radial_panels),
            angular_count: self.angular_count.max(other.angular_count),
            polar_count: self.polar_count.max(other.polar_count),
            azimuth_count: self.azimuth_count.max(other.azimuth_count),
        }
    }
}

/// Radial node samples of every mode up to a truncation.
///
/// `values[k][i]` is the profile of mode `k` at radial node `i`; modes are
/// laid out as `n + N` for `|n| <= N` in 2D and `n² + n + m` in 3D.
#[derive(Debug, Clone)]
pub struct ModalSamples {
    pub dimension: Dimension,
    pub truncation: usize,
    pub rule: RadialRule,
    pub values: Vec<Vec<Complex64>>,
}

impl ModalSamples {
    pub fn mode_count(dimension: Dimension, truncation: usize) -> usize {
        match dimension {
            Dimension::Two => 2 * truncation + 1,
            Dimension::Three => (truncation + 1) * (truncation + 1),
        }
    }
}

/// A compactly supported source `f` on `B_R`.
#[derive(Clone)]
pub struct SourceField {
    ctx: WaveContext,
    support_radius: f64,
    breakpoints: Vec<f64>,
    discretization: Discretization,
    kind: SourceKind,
}

impl fmt::Debug for SourceField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SourceField")
            .field("ctx", &self.ctx)
            .field("support_radius", &self.support_radius)
            .field("breakpoints", &self.breakpoints)
            .field("kind", &self.kind)
            .finish()
    }
}

fn check_support(ctx: &WaveContext, support_radius: f64) -> Result<()> {
    if !(support_radius.is_finite() && support_radius > 0.0) {
        return Err(Error::param("support_radius", format!("must be positive, got {support_radius}")));
    }
    if support_radius > ctx.radius() * (1.0 + 1e-14) {
        return Err(Error::Support(format!(
            "support radius {support_radius} exceeds R = {}",
            ctx.radius()
        )));
    }
    Ok(())
}

impl SourceField {
    fn build(ctx: &WaveContext, support_radius: f64, kind: SourceKind) -> Result<Self> {
        check_support(ctx, support_radius)?;
        Ok(Self {
            ctx: *ctx,
            support_radius,
            breakpoints: vec![0.0, support_radius],
            discretization: Discretization::default(),
            kind,
        })
    }

    /// Source given pointwise; values at `|x| >= support_radius` are ignored.
    pub fn from_fn<F>(ctx: &WaveContext, support_radius: f64, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    {
        Self::build(ctx, support_radius, SourceKind::Callable(Arc::new(f)))
    }

    /// Radially symmetric source `f(x) = profile(|x|)`.
    pub fn from_radial<F>(ctx: &WaveContext, support_radius: f64, profile: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        let modes = ModalProfiles::radial(ctx.dimension(), Arc::new(profile));
        Self::build(ctx, support_radius, SourceKind::Modal(modes))
    }

    /// Source given by its angular modes.
    pub fn from_modes(ctx: &WaveContext, support_radius: f64, modes: ModalProfiles) -> Result<Self> {
        let ok = matches!(
            (&modes, ctx.dimension()),
            (ModalProfiles::Cylindrical(_), Dimension::Two) | (ModalProfiles::Spherical(_), Dimension::Three)
        );
        if !ok {
            return Err(Error::Precondition("mode family does not match the context dimension".into()));
        }
        Self::build(ctx, support_radius, SourceKind::Modal(modes))
    }

    /// Source known only at the nodes of `rule`.
    pub fn from_grid(ctx: &WaveContext, support_radius: f64, rule: ProductRule, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != rule.len() {
            return Err(Error::param(
                "values",
                format!("expected {} grid values, got {}", rule.len(), values.len()),
            ));
        }
        if rule.radial().upper() > support_radius * (1.0 + 1e-14) {
            return Err(Error::Support("grid extends beyond the support radius".into()));
        }
        Self::build(ctx, support_radius, SourceKind::Grid(Arc::new(GridSamples { rule, values })))
    }

    pub fn zero(ctx: &WaveContext) -> Self {
        Self::build(ctx, ctx.radius(), SourceKind::Modal(ModalProfiles::empty(ctx.dimension())))
            .expect("R is a valid support radius")
    }

    /// `f ≡ value` on `B_R`.
    pub fn constant(ctx: &WaveContext, value: f64) -> Self {
        Self::from_radial(ctx, ctx.radius(), move |_| Complex64::new(value, 0.0)).expect("R is a valid support radius")
    }

    /// Gaussian `amplitude · exp(−|x − center|² / 2 width²)` cut off at `|x| = R`.
    pub fn gaussian(ctx: &WaveContext, center: &[f64], width: f64, amplitude: f64) -> Result<Self> {
        ctx.check_point(center, "center")?;
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::param("width", format!("must be positive, got {width}")));
        }
        if norm(center) >= ctx.radius() {
            return Err(Error::Support("Gaussian center must lie inside B_R".into()));
        }
        let c = center.to_vec();
        let s2 = 2.0 * width * width;
        Self::from_fn(ctx, ctx.radius(), move |x| {
            let d2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
            Complex64::new(amplitude * (-d2 / s2).exp(), 0.0)
        })
    }

    /// `J_n(κ|x|) e^{in arg x}` restricted to `B_R` (2D).
    pub fn bessel_mode_2d(ctx: &WaveContext, n: i32) -> Result<Self> {
        if ctx.dimension() != Dimension::Two {
            return Err(Error::Precondition("bessel_mode_2d needs a 2D context".into()));
        }
        let k = ctx.kappa();
        let profile = RadialProfile::analytic(move |r| {
            Complex64::new(crate::specfun::bessel_j(n, k * r).unwrap_or(0.0), 0.0)
        });
        Self::from_modes(
            ctx,
            ctx.radius(),
            ModalProfiles::Cylindrical(BTreeMap::from([(ModeIndex2D(n), profile)])),
        )
    }

    /// `j_n(κ|x|) Y_n^m(x̂)` restricted to `B_R` (3D).
    pub fn bessel_mode_3d(ctx: &WaveContext, n: u32, m: i32) -> Result<Self> {
        if ctx.dimension() != Dimension::Three {
            return Err(Error::Precondition("bessel_mode_3d needs a 3D context".into()));
        }
        let idx = ModeIndex3D::new(n, m)?;
        let k = ctx.kappa();
        let profile = RadialProfile::analytic(move |r| {
            Complex64::new(crate::specfun::sph_bessel_j(n, k * r).unwrap_or(0.0), 0.0)
        });
        Self::from_modes(ctx, ctx.radius(), ModalProfiles::Spherical(BTreeMap::from([(idx, profile)])))
    }

    pub fn ctx(&self) -> &WaveContext {
        &self.ctx
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn kind(&self) -> &SourceKind {
        &self.kind
    }

    pub fn discretization(&self) -> Discretization {
        self.discretization
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn with_discretization(mut self, discretization: Discretization) -> Result<Self> {
        if discretization.radial_order < 2 || discretization.radial_panels == 0 {
            return Err(Error::param("radial_order", "radial order must be >= 2 with at least one panel"));
        }
        if discretization.angular_count == 0 || discretization.polar_count == 0 || discretization.azimuth_count == 0 {
            return Err(Error::param("angular_count", "angular counts must be positive"));
        }
        self.discretization = discretization;
        Ok(self)
    }

    /// Additional radii where the radial rule should place panel boundaries
    /// (typically where the source is not smooth).
    pub fn with_breakpoints(mut self, radii: &[f64]) -> Result<Self> {
        let mut b = self.breakpoints.clone();
        for &r in radii {
            if !(r > 0.0 && r < self.support_radius) {
                return Err(Error::param("breakpoints", format!("{r} is not inside (0, support_radius)")));
            }
            b.push(r);
        }
        b.sort_by(f64::total_cmp);
        b.dedup();
        self.breakpoints = b;
        Ok(self)
    }

    pub fn is_modal(&self) -> bool {
        matches!(self.kind, SourceKind::Modal(_))
    }

    /// `f(x)`; zero outside the support.
    pub fn evaluate(&self, x: &[f64]) -> Result<Complex64> {
        self.ctx.check_point(x, "x")?;
        if norm(x) >= self.support_radius {
            return Ok(ZERO);
        }
        match &self.kind {
            SourceKind::Callable(f) => Ok(f(x)),
            SourceKind::Modal(m) => Ok(m.synthesize(x)),
            SourceKind::Grid(_) => Err(Error::NotSampled(
                "grid sources can only be integrated, not evaluated pointwise".into(),
            )),
        }
    }

    /// Composite radial rule over `[0, support_radius]`.
    pub fn radial_rule(&self) -> Result<RadialRule> {
        if let SourceKind::Grid(g) = &self.kind {
            return Ok(g.rule.radial().clone());
        }
        let mut breaks = Vec::new();
        for pair in self.breakpoints.windows(2) {
            let p = self.discretization.radial_panels;
            for k in 0..p {
                breaks.push(pair[0] + (pair[1] - pair[0]) * k as f64 / p as f64);
            }
        }
        breaks.push(self.support_radius);
        RadialRule::composite(&breaks, self.discretization.radial_order)
    }

    /// Angular rule from the discretization, refined to resolve `truncation` modes.
    pub fn angular_rule(&self, truncation: usize) -> Result<AngularRule> {
        if let SourceKind::Grid(g) = &self.kind {
            return Ok(g.rule.angular().clone());
        }
        let d = &self.discretization;
        match self.ctx.dimension() {
            Dimension::Two => AngularRule::circle(d.angular_count.max(2 * truncation + 2)),
            Dimension::Three => {
                AngularRule::sphere(d.polar_count.max(truncation + 1), d.azimuth_count.max(2 * truncation + 2))
            }
        }
    }

    /// Product rule over the support ball.
    pub fn product_rule(&self) -> Result<ProductRule> {
        if let SourceKind::Grid(g) = &self.kind {
            return Ok(g.rule.clone());
        }
        Ok(ProductRule::new(self.ctx.dimension(), self.radial_rule()?, self.angular_rule(0)?))
    }

    /// Values on [`SourceField::product_rule`].
    pub fn grid_samples(&self) -> Result<GridSamples> {
        if let SourceKind::Grid(g) = &self.kind {
            return Ok((**g).clone());
        }
        let rule = self.product_rule()?;
        let mut values = Vec::with_capacity(rule.len());
        for i in 0..rule.radial().len() {
            for j in 0..rule.angular().len() {
                values.push(self.evaluate(&rule.point(i, j))?);
            }
        }
        Ok(GridSamples { rule, values })
    }

    /// The same source stored as grid samples.
    pub fn sampled(&self) -> Result<Self> {
        let g = self.grid_samples()?;
        let mut out = Self::from_grid(&self.ctx, self.support_radius, g.rule, g.values)?;
        out.discretization = self.discretization;
        out.breakpoints = self.breakpoints.clone();
        Ok(out)
    }

    /// `‖f‖_{L²(B_R)}`; by Parseval over radial profiles for modal sources.
    pub fn l2_norm(&self) -> Result<f64> {
        match &self.kind {
            SourceKind::Modal(m) => {
                let rule = self.radial_rule()?;
                let (profiles, jac_pow, angular): (Vec<&RadialProfile>, i32, f64) = match m {
                    ModalProfiles::Cylindrical(map) => (map.values().collect(), 1, 2.0 * PI),
                    ModalProfiles::Spherical(map) => (map.values().collect(), 2, 1.0),
                };
                let mut total = 0.0;
                for p in profiles {
                    total += angular * rule.integrate(|r| p.eval(r).norm_sqr() * r.powi(jac_pow));
                }
                Ok(total.sqrt())
            }
            _ => {
                let g = self.grid_samples()?;
                let mut total = 0.0;
                let na = g.rule.angular().len();
                for (idx, v) in g.values.iter().enumerate() {
                    total += g.rule.weight(idx / na, idx % na) * v.norm_sqr();
                }
                Ok(total.sqrt())
            }
        }
    }

    /// `c · f`.
    pub fn scaled(&self, c: Complex64) -> Self {
        let kind = match &self.kind {
            SourceKind::Callable(f) => {
                let f = f.clone();
                SourceKind::Callable(Arc::new(move |x| c * f(x)))
            }
            SourceKind::Modal(m) => SourceKind::Modal(m.map_profiles(|p| p.scaled(c))),
            SourceKind::Grid(g) => SourceKind::Grid(Arc::new(GridSamples {
                rule: g.rule.clone(),
                values: g.values.iter().map(|v| c * v).collect(),
            })),
        };
        Self { kind, ..self.clone() }
    }

    /// `f + g`. Both sources must share the wave context.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        if self.ctx != other.ctx {
            return Err(Error::Precondition("sources live in different wave contexts".into()));
        }
        let support_radius = self.support_radius.max(other.support_radius);
        let mut breakpoints: Vec<f64> = self.breakpoints.iter().chain(&other.breakpoints).copied().collect();
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        let discretization = self.discretization.finest(&other.discretization);
        let kind = match (&self.kind, &other.kind) {
            (SourceKind::Modal(a), SourceKind::Modal(b)) => SourceKind::Modal(a.merged(b)?),
            (SourceKind::Grid(_), _) | (_, SourceKind::Grid(_)) => {
                let (grid, rest) = match (&self.kind, &other.kind) {
                    (SourceKind::Grid(g), _) => (g, other),
                    (_, SourceKind::Grid(g)) => (g, self),
                    _ => unreachable!(),
                };
                let values = match &rest.kind {
                    SourceKind::Grid(h) => {
                        if h.rule.radial().nodes() != grid.rule.radial().nodes()
                            || h.rule.angular().len() != grid.rule.angular().len()
                        {
                            return Err(Error::NotSampled("grid sources on different grids".into()));
                        }
                        grid.values.iter().zip(&h.values).map(|(a, b)| a + b).collect()
                    }
                    _ => {
                        let mut v = Vec::with_capacity(grid.values.len());
                        for i in 0..grid.rule.radial().len() {
                            for j in 0..grid.rule.angular().len() {
                                v.push(grid.values[i * grid.rule.angular().len() + j] + rest.evaluate(&grid.rule.point(i, j))?);
                            }
                        }
                        v
                    }
                };
                return Ok(Self {
                    ctx: self.ctx,
                    support_radius,
                    breakpoints,
                    discretization,
                    kind: SourceKind::Grid(Arc::new(GridSamples {
                        rule: grid.rule.clone(),
                        values,
                    })),
                });
            }
            _ => {
                let (a, b) = (self.clone(), other.clone());
                SourceKind::Callable(Arc::new(move |x| {
                    a.evaluate(x).unwrap_or(ZERO) + b.evaluate(x).unwrap_or(ZERO)
                }))
            }
        };
        Ok(Self {
            ctx: self.ctx,
            support_radius,
            breakpoints,
            discretization,
            kind,
        })
    }

    /// Radial samples of all modes with `|n| <= truncation` (2D) or
    /// `n <= truncation` (3D) on [`SourceField::radial_rule`].
    pub fn modal_samples(&self, truncation: usize) -> Result<ModalSamples> {
        let dim = self.ctx.dimension();
        let rule = self.radial_rule()?;
        let count = ModalSamples::mode_count(dim, truncation);
        let mut values = vec![vec![ZERO; rule.len()]; count];
        match &self.kind {
            SourceKind::Modal(ModalProfiles::Cylindrical(map)) => {
                for (k, p) in map {
                    if k.0.unsigned_abs() as usize <= truncation {
                        let row = &mut values[(k.0 + truncation as i32) as usize];
                        for (slot, &r) in row.iter_mut().zip(rule.nodes()) {
                            *slot = p.eval(r);
                        }
                    }
                }
            }
            SourceKind::Modal(ModalProfiles::Spherical(map)) => {
                for (k, p) in map {
                    if k.n as usize <= truncation {
                        let row = &mut values[k.linear()];
                        for (slot, &r) in row.iter_mut().zip(rule.nodes()) {
                            *slot = p.eval(r);
                        }
                    }
                }
            }
            SourceKind::Callable(_) | SourceKind::Grid(_) => {
                let angular = self.angular_rule(truncation)?;
                let grid_values = match &self.kind {
                    SourceKind::Grid(g) => g.values.clone(),
                    _ => {
                        let mut v = Vec::with_capacity(rule.len() * angular.len());
                        for &r in rule.nodes() {
                            for d in angular.directions() {
                                let x: Vec<f64> = d.iter().map(|c| r * c).collect();
                                v.push(self.evaluate(&x)?);
                            }
                        }
                        v
                    }
                };
                let na = angular.len();
                for i in 0..rule.len() {
                    let ring = &grid_values[i * na..(i + 1) * na];
                    let coeffs = match dim {
                        Dimension::Two => project_circle(ring, &angular, truncation),
                        Dimension::Three => project_sphere(ring, &angular, truncation),
                    };
                    for (row, c) in values.iter_mut().zip(coeffs) {
                        row[i] = c;
                    }
                }
            }
        }
        Ok(ModalSamples {
            dimension: dim,
            truncation,
            rule,
            values,
        })
    }
}

/// `(1/2π) ∫ g(θ) e^{−inθ} dθ` for `|n| <= truncation`, indexed by `n + truncation`.
fn project_circle(ring: &[Complex64], angular: &AngularRule, truncation: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; 2 * truncation + 1];
    let t = truncation as i32;
    for ((theta, _), (g, w)) in angular.angles().iter().zip(ring.iter().zip(angular.weights())) {
        let step = Complex64::from_polar(1.0, -theta);
        let mut phase = Complex64::from_polar(1.0, t as f64 * theta);
        for slot in out.iter_mut() {
            *slot += w * g * phase;
            phase *= step;
        }
    }
    for v in out.iter_mut() {
        *v /= 2.0 * PI;
    }
    out
}

/// `∫ g conj(Y_n^m) dΩ` for `n <= truncation`, in `n² + n + m` order; DFT in
/// `φ` first, then a Gauss sum against the normalized Legendre functions.
fn project_sphere(ring: &[Complex64], angular: &AngularRule, truncation: usize) -> Vec<Complex64> {
    let (np, na) = (angular.polar_count(), angular.azimuth_count());
    let t = truncation as i32;
    let mut out = vec![ZERO; (truncation + 1) * (truncation + 1)];
    let h = 2.0 * PI / na as f64;
    for p in 0..np {
        let (theta, _) = angular.angles()[p * na];
        // Gauss weight in cos θ (angular weights are w_θ · h)
        let wt = angular.weights()[p * na] / h;
        // F_m = ∫ g e^{−imφ} dφ
        let mut fm = vec![ZERO; 2 * truncation + 1];
        for a in 0..na {
            let phi = h * a as f64;
            let g = ring[p * na + a];
            let step = Complex64::from_polar(1.0, -phi);
            let mut phase = Complex64::from_polar(1.0, t as f64 * phi);
            for slot in fm.iter_mut() {
                *slot += h * g * phase;
                phase *= step;
            }
        }
        let q = legendre_normalized(truncation, theta.cos(), theta.sin());
        for n in 0..=truncation {
            for m in -(n as i32)..=n as i32 {
                let ma = m.unsigned_abs() as usize;
                let mut qnm = q[n * (n + 1) / 2 + ma];
                if m < 0 && ma % 2 == 1 {
                    qnm = -qnm;
                }
                out[((n * n + n) as isize + m as isize) as usize] += wt * qnm * fm[(m + t) as usize];
            }
        }
    }
    out
}

/// Restriction of `src` to modes up to `truncation`, as a modal source.
pub fn project_modes(src: &SourceField, truncation: usize) -> Result<SourceField> {
    let modes = match &src.kind {
        SourceKind::Modal(m) => m.truncated(truncation),
        _ => {
            let samples = src.modal_samples(truncation)?;
            let rule = Arc::new(samples.rule.clone());
            match src.ctx.dimension() {
                Dimension::Two => ModalProfiles::Cylindrical(
                    samples
                        .values
                        .into_iter()
                        .enumerate()
                        .map(|(k, v)| (ModeIndex2D(k as i32 - truncation as i32), RadialProfile::sampled(rule.clone(), v)))
                        .collect(),
                ),
                Dimension::Three => ModalProfiles::Spherical(
                    ModeIndex3D::all(truncation as u32)
                        .zip(samples.values)
                        .map(|(k, v)| (k, RadialProfile::sampled(rule.clone(), v)))
                        .collect(),
                ),
            }
        }
    };
    Ok(SourceField {
        kind: SourceKind::Modal(modes),
        ..src.clone()
    })
}

// ---------------------------------------------------------------------------
// Nonradiating constructions
// ---------------------------------------------------------------------------

/// Smooth compactly supported field fed to the operator construction.
#[derive(Clone)]
pub enum BumpShape {
    /// `amplitude · exp(−1 / (1 − |x|²/ρ²))` for `|x| < ρ`, with closed-form
    /// fourth derivatives.
    Mollifier { radius: f64, amplitude: f64 },
    /// User field with support in `|x| < support_radius`; its bi-Laplacian is
    /// taken with nested fourth-order central differences of spacing `step`,
    /// so the resulting source is accurate only to roughly `step⁴` times the
    /// eighth derivatives of the field.
    Custom {
        support_radius: f64,
        field: PointFn,
        step: f64,
    },
}

impl fmt::Debug for BumpShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Mollifier { radius, amplitude } => f
                .debug_struct("Mollifier")
                .field("radius", radius)
                .field("amplitude", amplitude)
                .finish(),
            Self::Custom { support_radius, step, .. } => f
                .debug_struct("Custom")
                .field("support_radius", support_radius)
                .field("step", step)
                .finish(),
        }
    }
}

impl BumpShape {
    /// Mollifier of radius `0.8 R` and unit amplitude.
    pub fn standard(ctx: &WaveContext) -> Self {
        Self::Mollifier {
            radius: 0.8 * ctx.radius(),
            amplitude: 1.0,
        }
    }

    pub fn support_radius(&self) -> f64 {
        match self {
            Self::Mollifier { radius, .. } => *radius,
            Self::Custom { support_radius, .. } => *support_radius,
        }
    }
}

/// Mollifier value and bi-Laplacian at squared radius `q`, dimension `d`.
fn mollifier_with_bilaplacian(q: f64, rho: f64, d: f64) -> (f64, f64) {
    let t = 1.0 - q / (rho * rho);
    if t <= 0.0 {
        return (0.0, 0.0);
    }
    let e = (-1.0 / t).exp();
    let u = 1.0 / t;
    // derivatives of exp(−1/t) in t
    let e2 = e * (u.powi(4) - 2.0 * u.powi(3));
    let e3 = e * (u.powi(6) - 6.0 * u.powi(5) + 6.0 * u.powi(4));
    let e4 = e * (u.powi(8) - 12.0 * u.powi(7) + 36.0 * u.powi(6) - 24.0 * u.powi(5));
    // chain rule for G(q) = E(1 − q/ρ²)
    let s = -1.0 / (rho * rho);
    let (g2, g3, g4) = (s * s * e2, s.powi(3) * e3, s.powi(4) * e4);
    let bilap = 4.0 * d * (d + 2.0) * g2 + 16.0 * (d + 2.0) * q * g3 + 16.0 * q * q * g4;
    (e, bilap)
}

/// Fourth-order central-difference Laplacian.
fn fd_laplacian(f: &dyn Fn(&[f64]) -> Complex64, x: &[f64], h: f64) -> Complex64 {
    let mut acc = ZERO;
    let centre = f(x);
    let mut p = x.to_vec();
    for axis in 0..x.len() {
        let mut at = |s: f64| {
            p[axis] = x[axis] + s * h;
            let v = f(&p);
            p[axis] = x[axis];
            v
        };
        acc += -at(2.0) + 16.0 * at(1.0) - 30.0 * centre + 16.0 * at(-1.0) - at(-2.0);
    }
    acc / (12.0 * h * h)
}

/// `f = −(Δ² − κ⁴) b` for a bump `b` compactly supported inside `B_R`.
pub fn make_bump_nonradiating(ctx: &WaveContext, bump: &BumpShape) -> Result<SourceField> {
    let rho = bump.support_radius();
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::param("radius", format!("bump radius must be positive, got {rho}")));
    }
    if rho >= ctx.radius() {
        return Err(Error::Support(format!(
            "bump support radius {rho} must be strictly smaller than R = {}",
            ctx.radius()
        )));
    }
    let k4 = ctx.kappa().powi(4);
    let d = ctx.dim() as f64;
    let src = match bump {
        BumpShape::Mollifier { radius, amplitude } => {
            let (rho, amp) = (*radius, *amplitude);
            SourceField::from_radial(ctx, rho, move |r| {
                let (b, bilap) = mollifier_with_bilaplacian(r * r, rho, d);
                Complex64::new(amp * (k4 * b - bilap), 0.0)
            })?
        }
        BumpShape::Custom { field, step, .. } => {
            if !(step.is_finite() && *step > 0.0) {
                return Err(Error::param("step", "finite-difference step must be positive"));
            }
            let (field, h) = (field.clone(), *step);
            SourceField::from_fn(ctx, rho, move |x| {
                let inner = |y: &[f64]| fd_laplacian(&*field, y, h);
                k4 * field(x) - fd_laplacian(&inner, x, h)
            })?
        }
    };
    // the mollifier has all derivatives vanishing at ρ but steep interior
    // layers; four panels keep the radial rule at machine precision
    let disc = Discretization {
        radial_panels: 4,
        ..Discretization::default()
    };
    src.with_discretization(disc)
}

/// Composite Gauss rule used for the normalizing integrals of the Bessel constructions.
fn normalizing_rule(radius: f64) -> Result<RadialRule> {
    RadialRule::uniform(radius, 8, 48)
}

/// Index `k` with `κR` the k-th positive zero of `J_0`, if within `1e−12` relative.
fn j0_root_index(kr: f64) -> Option<u32> {
    let guess = (kr / PI + 0.25).round().max(1.0) as u32;
    let lo = guess.saturating_sub(1).max(1);
    (lo..=guess + 1).find(|&k| (bessel_j0_zero(k) - kr).abs() <= 1e-12 * kr.max(1.0))
}

/// Radially symmetric 2D source `(Δ − κ²) f_M` with
/// `f_M = J_0³(κr)/∫J_0⁴ r dr − J_0²(κr)/∫J_0³ r dr` on `B_R`, where `κR` must
/// be a zero of `J_0`. Both `f_M` and its radial derivative vanish at `r = R`,
/// while the source itself jumps there.
pub fn make_2d_bessel_nonradiating(ctx: &WaveContext) -> Result<SourceField> {
    if ctx.dimension() != Dimension::Two {
        return Err(Error::Precondition("the cylindrical Bessel construction is two-dimensional".into()));
    }
    let (k, radius) = (ctx.kappa(), ctx.radius());
    if j0_root_index(k * radius).is_none() {
        return Err(Error::param(
            "kappa",
            format!("kappa * R = {} is not a zero of J_0; use a root index", k * radius),
        ));
    }
    let rule = normalizing_rule(radius)?;
    let j0 = |r: f64| bessel_j_seq(0, k * r).map(|v| v[0]).unwrap_or(0.0);
    let d4 = rule.integrate(|r| j0(r).powi(4) * r);
    let d3 = rule.integrate(|r| j0(r).powi(3) * r);
    for (name, d) in [("∫J_0⁴ r dr", d4), ("∫J_0³ r dr", d3)] {
        if d.abs() < 1e-12 * radius * radius {
            return Err(Error::Degenerate(format!("{name} = {d:e} vanishes")));
        }
    }
    let k2 = k * k;
    SourceField::from_radial(ctx, radius, move |r| {
        let j = bessel_j_seq(1, k * r).unwrap_or_else(|_| vec![0.0, 0.0]);
        let (a, b) = (j[0], j[1]);
        // (Δ − κ²) J_0^p = κ² [p(p−1) J_0^{p−2} J_1² − (p+1) J_0^p]
        let cubic = k2 * (6.0 * a * b * b - 4.0 * a.powi(3));
        let square = k2 * (2.0 * b * b - 3.0 * a * a);
        Complex64::new(cubic / d4 - square / d3, 0.0)
    })
}

/// Radially symmetric 3D source `(Δ + κ²) g_H` with
/// `g_H = Σ ± j_0^{m}(κr) / ∫ j_0^{m}(κr) j_0(iκr) r² dr` over `m ∈ {m1, m2}`,
/// where `κR` must be a multiple of `π`.
pub fn make_3d_bessel_nonradiating(ctx: &WaveContext, m1: u32, m2: u32) -> Result<SourceField> {
    if ctx.dimension() != Dimension::Three {
        return Err(Error::Precondition("the spherical Bessel construction is three-dimensional".into()));
    }
    if m1 == m2 {
        return Err(Error::param("m2", "exponents must be distinct"));
    }
    for (name, m) in [("m1", m1), ("m2", m2)] {
        if m < 3 {
            return Err(Error::param(name, format!("exponent must be at least 3, got {m}")));
        }
    }
    let (k, radius) = (ctx.kappa(), ctx.radius());
    let ratio = k * radius / PI;
    if ratio < 0.5 || (ratio - ratio.round()).abs() > 1e-12 * ratio {
        return Err(Error::param(
            "kappa",
            format!("kappa * R = {} is not a zero of j_0; use a root index", k * radius),
        ));
    }
    let rule = normalizing_rule(radius)?;
    let j0 = |r: f64| sph_bessel_j_seq(0, k * r).map(|v| v[0]).unwrap_or(0.0);
    // j_0(iκr) = sinh(κr)/(κr)
    let j0_imag = |r: f64| if r == 0.0 { 1.0 } else { (k * r).sinh() / (k * r) };
    let mut denominators = [0.0; 2];
    for (slot, (name, m)) in denominators.iter_mut().zip([("m1", m1), ("m2", m2)]) {
        let e = rule.integrate(|r| j0(r).powi(m as i32) * j0_imag(r) * r * r);
        if e.abs() < 1e-12 * radius.powi(3) {
            return Err(Error::Degenerate(format!("normalizing integral for {name} vanishes ({e:e})")));
        }
        *slot = e;
    }
    let k2 = k * k;
    let term = move |a: f64, b: f64, p: i32| -> f64 {
        // (Δ + κ²) j_0^p = κ² (p−1) j_0^{p−2} [p j_1² − j_0²]
        k2 * (p - 1) as f64 * a.powi(p - 2) * (p as f64 * b * b - a * a)
    };
    let (e1, e2) = (denominators[0], denominators[1]);
    SourceField::from_radial(ctx, radius, move |r| {
        let j = sph_bessel_j_seq(1, k * r).unwrap_or_else(|_| vec![0.0, 0.0]);
        let (a, b) = (j[0], j[1]);
        Complex64::new(term(a, b, m1 as i32) / e1 - term(a, b, m2 as i32) / e2, 0.0)
    })
}

/// Named nonradiating constructions.
#[derive(Debug, Clone)]
pub enum NonradiatingRecipe {
    BumpOperator(BumpShape),
    TwoDBessel,
    ThreeDBessel { m1: u32, m2: u32 },
}

impl NonradiatingRecipe {
    pub fn build(&self, ctx: &WaveContext) -> Result<SourceField> {
        match self {
            Self::BumpOperator(b) => make_bump_nonradiating(ctx, b),
            Self::TwoDBessel => make_2d_bessel_nonradiating(ctx),
            Self::ThreeDBessel { m1, m2 } => make_3d_bessel_nonradiating(ctx, *m1, *m2),
        }
    }
}
