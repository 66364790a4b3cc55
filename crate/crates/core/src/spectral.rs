//! Modal coefficients, the restricted transforms `f̂` and `f̌` on `|ξ| = κ`,
//! their boundary-data counterparts `Û` and `V̌`, null-space residuals and the
//! nonradiating verdict.
//!
//! Coefficients (2D, `f = Σ f_n(r) e^{inθ}`):
//! `α_n = ∫_0^R f_n(r) J_n(κr) r dr`, `β_n = ∫_0^R f_n(r) J_n(iκr) r dr`;
//! in 3D `f = Σ f_n^m(r) Y_n^m` with `j_n` and the measure `r² dr`.
//! A source is nonradiating exactly when all `α` and `β` vanish, equivalently
//! when `f̂` and `f̌` vanish on the sphere of radius `κ`.
//!
//! Frequencies are never passed raw: callers give unit directions and the
//! transforms are evaluated at `κ` times them, the only radius on which
//! boundary data determine them. The delta-function identity behind
//! `f̂ = Û` is not computed; only its consequence on `|ξ| = κ` is.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::context::{dot, norm, Dimension, WaveContext};
use crate::error::{Error, Result};
use crate::fields::{exterior_from_coefficients, outgoing_factors, BoundaryTrace};
use crate::kernels::green_radial;
use crate::quadrature::{AngularRule, RadialRule};
use crate::sources::SourceField;
use crate::specfun::{
    bessel_i_scaled_seq, bessel_j_seq, i_pow, sph_bessel_i_scaled_seq, sph_bessel_j_seq, ModeIndex3D,
    SphHarmonicTable, EXP_OVERFLOW_THRESHOLD,
};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Default verdict tolerance, relative to `‖f‖`.
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// Default modal truncation `2⌈κR⌉ + 16`.
pub fn default_truncation(ctx: &WaveContext) -> usize {
    2 * (ctx.kappa() * ctx.radius()).ceil() as usize + 16
}

/// `α`, `β` for all modes up to a truncation.
///
/// Layout: `n + N` for `|n| <= N` (2D), `n² + n + m` (3D).
#[derive(Debug, Clone, PartialEq)]
pub struct ModalCoefficients {
    dimension: Dimension,
    truncation: usize,
    norm_f: f64,
    alpha: Vec<Complex64>,
    beta: Vec<Complex64>,
}

impl ModalCoefficients {
    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn norm_f(&self) -> f64 {
        self.norm_f
    }

    pub fn alpha(&self) -> &[Complex64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[Complex64] {
        &self.beta
    }

    fn index_2d(&self, n: i32) -> Option<usize> {
        (n.unsigned_abs() as usize <= self.truncation).then(|| (n + self.truncation as i32) as usize)
    }

    fn index_3d(&self, n: u32, m: i32) -> Option<usize> {
        (n as usize <= self.truncation && m.unsigned_abs() <= n).then(|| ModeIndex3D { n, m }.linear())
    }

    /// `α_n`; zero beyond the truncation.
    pub fn alpha_2d(&self, n: i32) -> Complex64 {
        self.index_2d(n).map_or(ZERO, |i| self.alpha[i])
    }

    pub fn beta_2d(&self, n: i32) -> Complex64 {
        self.index_2d(n).map_or(ZERO, |i| self.beta[i])
    }

    pub fn alpha_3d(&self, n: u32, m: i32) -> Complex64 {
        self.index_3d(n, m).map_or(ZERO, |i| self.alpha[i])
    }

    pub fn beta_3d(&self, n: u32, m: i32) -> Complex64 {
        self.index_3d(n, m).map_or(ZERO, |i| self.beta[i])
    }

    /// `max (|α| + |β|) / ‖f‖` over modes (0 for the zero source).
    pub fn residual(&self) -> f64 {
        if self.norm_f == 0.0 {
            return 0.0;
        }
        self.alpha
            .iter()
            .zip(&self.beta)
            .map(|(a, b)| a.norm() + b.norm())
            .fold(0.0, f64::max)
            / self.norm_f
    }

    /// Modal synthesis of `f̂(κ d)`: `2π Σ (−i)^n α_n e^{inφ}` (2D),
    /// `4π Σ (−i)^n α_n^m Y_n^m(d)` (3D).
    pub fn fourier_on_circle(&self, directions: &[Vec<f64>]) -> Result<Vec<Complex64>> {
        self.synthesize(directions, &self.alpha, -1)
    }

    /// Modal synthesis of `f̌(κ d)`: `2π Σ i^n β_n e^{inφ}` (2D),
    /// `4π Σ i^n β_n^m Y_n^m(d)` (3D).
    pub fn laplace_on_circle(&self, directions: &[Vec<f64>]) -> Result<Vec<Complex64>> {
        self.synthesize(directions, &self.beta, 1)
    }

    fn synthesize(&self, directions: &[Vec<f64>], coeffs: &[Complex64], rot: i32) -> Result<Vec<Complex64>> {
        let t = self.truncation;
        directions
            .iter()
            .map(|d| {
                let d = unit_direction(self.dimension, d)?;
                Ok(match self.dimension {
                    Dimension::Two => {
                        let phi = crate::context::azimuth(&d);
                        let mut s = ZERO;
                        for n in -(t as i32)..=t as i32 {
                            s += i_pow(rot * n) * coeffs[(n + t as i32) as usize] * Complex64::from_polar(1.0, n as f64 * phi);
                        }
                        2.0 * PI * s
                    }
                    Dimension::Three => {
                        let table = SphHarmonicTable::for_direction(t as u32, &d);
                        let mut s = ZERO;
                        for idx in ModeIndex3D::all(t as u32) {
                            s += i_pow(rot * idx.n as i32) * coeffs[idx.linear()] * table.get(idx.n, idx.m);
                        }
                        4.0 * PI * s
                    }
                })
            })
            .collect()
    }
}

/// Validated copy of a unit direction.
pub fn unit_direction(dimension: Dimension, d: &[f64]) -> Result<Vec<f64>> {
    if d.len() != dimension.as_usize() || d.iter().any(|c| !c.is_finite()) {
        return Err(Error::param(
            "direction",
            format!("expected a finite {}-vector", dimension.as_usize()),
        ));
    }
    let n = norm(d);
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::param("direction", format!("must have unit length, got {n}")));
    }
    Ok(d.iter().map(|c| c / n).collect())
}

fn guard_exponential(ctx: &WaveContext) -> Result<()> {
    if ctx.kappa() * ctx.radius() > 700.0 {
        return Err(Error::Overflow {
            what: "exponential weight e^{κR}".into(),
            threshold: EXP_OVERFLOW_THRESHOLD,
        });
    }
    Ok(())
}

/// `α`, `β` for modes up to `truncation`, projecting the source if needed.
pub fn modal_coefficients(ctx: &WaveContext, src: &SourceField, truncation: usize) -> Result<ModalCoefficients> {
    if ctx != src.ctx() {
        return Err(Error::Precondition("source was built for a different wave context".into()));
    }
    guard_exponential(ctx)?;
    let samples = src.modal_samples(truncation)?;
    let norm_f = src.l2_norm()?;
    let rule: &RadialRule = &samples.rule;
    let count = samples.values.len();
    let mut alpha = vec![ZERO; count];
    let mut beta = vec![ZERO; count];
    let k = ctx.kappa();
    let t = truncation;
    for (i, (&r, &w)) in rule.nodes().iter().zip(rule.weights()).enumerate() {
        let z = k * r;
        match ctx.dimension() {
            Dimension::Two => {
                let j = bessel_j_seq(t, z)?;
                let iv = bessel_i_scaled_seq(t, z)?;
                let grow = z.exp();
                let wr = w * r;
                for n in -(t as i32)..=t as i32 {
                    let a = n.unsigned_abs() as usize;
                    let f = samples.values[(n + t as i32) as usize][i];
                    if f == ZERO {
                        continue;
                    }
                    let jn = if n < 0 && a % 2 == 1 { -j[a] } else { j[a] };
                    let idx = (n + t as i32) as usize;
                    alpha[idx] += wr * jn * f;
                    // J_n(iκr) = i^n I_|n|(κr)
                    beta[idx] += wr * iv[a] * grow * i_pow(n) * f;
                }
            }
            Dimension::Three => {
                let j = sph_bessel_j_seq(t, z)?;
                let iv = sph_bessel_i_scaled_seq(t, z)?;
                let grow = z.exp();
                let wr = w * r * r;
                for idx in ModeIndex3D::all(t as u32) {
                    let f = samples.values[idx.linear()][i];
                    if f == ZERO {
                        continue;
                    }
                    let n = idx.n as usize;
                    alpha[idx.linear()] += wr * j[n] * f;
                    // j_n(iκr) = i^n i_n(κr)
                    beta[idx.linear()] += wr * iv[n] * grow * i_pow(n as i32) * f;
                }
            }
        }
    }
    Ok(ModalCoefficients {
        dimension: ctx.dimension(),
        truncation,
        norm_f,
        alpha,
        beta,
    })
}

/// `f̂` and `f̌` at `κ` times a unit direction.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSample {
    pub direction: Vec<f64>,
    pub f_hat: Complex64,
    pub f_check: Complex64,
}

/// Direction set and the bound on `|s|` for the exponential-weight transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralConfig {
    pub s_max: f64,
    pub direction_count: usize,
}

impl SpectralConfig {
    /// `s_max = 2κ`, 64 directions.
    pub fn for_context(ctx: &WaveContext) -> Self {
        Self {
            s_max: 2.0 * ctx.kappa(),
            direction_count: 64,
        }
    }

    pub fn validate(&self, ctx: &WaveContext) -> Result<()> {
        if !(self.s_max > ctx.kappa()) {
            return Err(Error::param("s_max", format!("must exceed kappa = {}", ctx.kappa())));
        }
        if self.direction_count == 0 {
            return Err(Error::param("direction_count", "must be positive"));
        }
        Ok(())
    }

    pub fn directions(&self, ctx: &WaveContext) -> Result<Vec<Vec<f64>>> {
        self.validate(ctx)?;
        direction_grid(ctx.dimension(), self.direction_count)
    }
}

/// Equispaced directions (2D) or a product grid matching the angular rule (3D).
pub fn direction_grid(dimension: Dimension, count: usize) -> Result<Vec<Vec<f64>>> {
    Ok(AngularRule::with_count(dimension, count)?.directions().to_vec())
}

/// `f̂(κd)` by modal synthesis with the default truncation.
pub fn fourier_on_circle(ctx: &WaveContext, src: &SourceField, directions: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    modal_coefficients(ctx, src, crate::fields::natural_truncation(ctx, src))?.fourier_on_circle(directions)
}

/// `f̌(κd)` by modal synthesis with the default truncation.
pub fn laplace_on_circle(ctx: &WaveContext, src: &SourceField, directions: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    modal_coefficients(ctx, src, crate::fields::natural_truncation(ctx, src))?.laplace_on_circle(directions)
}

/// Both transforms by modal synthesis.
pub fn spectral_samples(ctx: &WaveContext, src: &SourceField, directions: &[Vec<f64>]) -> Result<Vec<SpectralSample>> {
    let coeffs = modal_coefficients(ctx, src, crate::fields::natural_truncation(ctx, src))?;
    let f_hat = coeffs.fourier_on_circle(directions)?;
    let f_check = coeffs.laplace_on_circle(directions)?;
    directions
        .iter()
        .zip(f_hat.into_iter().zip(f_check))
        .map(|(d, (f_hat, f_check))| {
            Ok(SpectralSample {
                direction: unit_direction(ctx.dimension(), d)?,
                f_hat,
                f_check,
            })
        })
        .collect()
}

fn direct_transform(
    ctx: &WaveContext,
    src: &SourceField,
    directions: &[Vec<f64>],
    kernel: impl Fn(f64) -> Complex64,
) -> Result<Vec<Complex64>> {
    let grid = src.grid_samples()?;
    let na = grid.rule.angular().len();
    let dirs: Vec<Vec<f64>> = directions
        .iter()
        .map(|d| unit_direction(ctx.dimension(), d))
        .collect::<Result<_>>()?;
    let mut out = vec![ZERO; dirs.len()];
    for (idx, v) in grid.values.iter().enumerate() {
        if *v == ZERO {
            continue;
        }
        let (i, j) = (idx / na, idx % na);
        let y = grid.rule.point(i, j);
        let w = grid.rule.weight(i, j) * v;
        for (slot, d) in out.iter_mut().zip(&dirs) {
            *slot += w * kernel(ctx.kappa() * dot(d, &y));
        }
    }
    Ok(out)
}

/// `f̂(κd) = ∫ f(y) e^{−iκ d·y} dy` by direct product quadrature.
pub fn fourier_transform_direct(ctx: &WaveContext, src: &SourceField, directions: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    direct_transform(ctx, src, directions, |p| Complex64::from_polar(1.0, -p))
}

/// `f̌(κd) = ∫ f(y) e^{−κ d·y} dy` by direct product quadrature.
pub fn laplace_transform_direct(ctx: &WaveContext, src: &SourceField, directions: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    guard_exponential(ctx)?;
    direct_transform(ctx, src, directions, |p| Complex64::new((-p).exp(), 0.0))
}

/// `Û(ξ) = ∫_{∂B_R} [−(iξ·ν)Δu − ∂_νΔu + κ²∂_νu + κ²(iξ·ν)u] e^{−iξ·y} ds` at `ξ = κd`.
///
/// The 3D grouping `−∫[∂_νΔu − κ²∂_νu + (iξ·ν)Δu − κ²(iξ·ν)u]e^{−iξ·y} ds`
/// is the same expression.
pub fn u_hat_from_trace(ctx: &WaveContext, trace: &BoundaryTrace, directions: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    let k = ctx.kappa();
    let k2 = k * k;
    let grid = &trace.grid;
    directions
        .iter()
        .map(|d| {
            let d = unit_direction(ctx.dimension(), d)?;
            let mut s = ZERO;
            for (idx, (y, nu)) in grid.points().iter().zip(grid.normals()).enumerate() {
                let i_xi_nu = Complex64::new(0.0, k * dot(&d, nu));
                let density = -i_xi_nu * trace.lap_u[idx] - trace.dlap_u_dnu[idx]
                    + k2 * trace.du_dnu[idx]
                    + k2 * i_xi_nu * trace.u[idx];
                s += grid.weights()[idx] * density * Complex64::from_polar(1.0, -k * dot(&d, y));
            }
            Ok(s)
        })
        .collect()
}

/// `V̌(s) = −∫_{∂B_R} [∂_νΔu + κ²∂_νu + (s·ν)Δu + κ²(s·ν)u] e^{−s·y} ds` at `s = κd`.
pub fn v_check_from_trace(ctx: &WaveContext, trace: &BoundaryTrace, directions: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    guard_exponential(ctx)?;
    let k = ctx.kappa();
    let k2 = k * k;
    let grid = &trace.grid;
    directions
        .iter()
        .map(|d| {
            let d = unit_direction(ctx.dimension(), d)?;
            let mut s = ZERO;
            for (idx, (y, nu)) in grid.points().iter().zip(grid.normals()).enumerate() {
                let s_nu = k * dot(&d, nu);
                let density = trace.dlap_u_dnu[idx]
                    + k2 * trace.du_dnu[idx]
                    + s_nu * trace.lap_u[idx]
                    + k2 * s_nu * trace.u[idx];
                s -= grid.weights()[idx] * density * (-k * dot(&d, y)).exp();
            }
            Ok(s)
        })
        .collect()
}

/// Probe points: `count` directions on each radius.
fn probe_points(dimension: Dimension, radii: &[f64], count: usize) -> Result<Vec<Vec<f64>>> {
    let dirs = direction_grid(dimension, count)?;
    Ok(radii
        .iter()
        .flat_map(|r| dirs.iter().map(move |d| d.iter().map(|c| r * c).collect()))
        .collect())
}

/// `max |∫ J_0(κ|x−y|) f dy| + |∫ Φ_M(x,y) f dy|` over 16 directions on each
/// probe radius (`j_0` in 3D), from the modal expansions
/// `2π Σ α_n J_n(κ|x|) e^{in arg x}` and `4π Σ α_n^m j_n(κ|x|) Y_n^m(x̂)`.
pub fn nullspace_residual(ctx: &WaveContext, src: &SourceField, probe_radii: &[f64]) -> Result<f64> {
    let coeffs = modal_coefficients(ctx, src, default_truncation(ctx))?;
    nullspace_residual_from(ctx, &coeffs, probe_radii)
}

fn nullspace_residual_from(ctx: &WaveContext, coeffs: &ModalCoefficients, probe_radii: &[f64]) -> Result<f64> {
    for &r in probe_radii {
        if !(r > ctx.radius()) {
            return Err(Error::param("probe_radii", format!("probe radius {r} must exceed R")));
        }
    }
    let t = coeffs.truncation();
    let k = ctx.kappa();
    let mut worst = 0.0f64;
    for &r in probe_radii {
        let factors = outgoing_factors(ctx, t, r)?;
        for x in probe_points(ctx.dimension(), &[r], 16)? {
            let regular = match ctx.dimension() {
                Dimension::Two => {
                    let j = bessel_j_seq(t, k * r)?;
                    let theta = crate::context::azimuth(&x);
                    let mut s = ZERO;
                    for n in -(t as i32)..=t as i32 {
                        let a = n.unsigned_abs() as usize;
                        let jn = if n < 0 && a % 2 == 1 { -j[a] } else { j[a] };
                        s += coeffs.alpha_2d(n) * jn * Complex64::from_polar(1.0, n as f64 * theta);
                    }
                    2.0 * PI * s
                }
                Dimension::Three => {
                    let j = sph_bessel_j_seq(t, k * r)?;
                    let table = SphHarmonicTable::for_direction(t as u32, &x);
                    let mut s = ZERO;
                    for idx in ModeIndex3D::all(t as u32) {
                        s += coeffs.alpha_3d(idx.n, idx.m) * j[idx.n as usize] * table.get(idx.n, idx.m);
                    }
                    4.0 * PI * s
                }
            };
            // ∫ Φ_M f = −f_M
            let [_, _, f_m, _] = exterior_from_coefficients(ctx, coeffs, &factors, &x);
            worst = worst.max(regular.norm() + f_m.norm());
        }
    }
    Ok(worst)
}

/// Settings for [`verdict`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictConfig {
    /// Modal truncation; `None` means `2⌈κR⌉ + 16`.
    pub truncation: Option<usize>,
    pub tolerance: f64,
    pub direction_count: usize,
    /// Exterior probe radii as multiples of `R`.
    pub probe_radius_factors: Vec<f64>,
    pub probe_direction_count: usize,
    /// Extra modes used for the stability re-run.
    pub stability_offset: usize,
}

impl Default for VerdictConfig {
    fn default() -> Self {
        Self {
            truncation: None,
            tolerance: DEFAULT_TOLERANCE,
            direction_count: 64,
            probe_radius_factors: vec![1.05, 1.5, 3.0],
            probe_direction_count: 16,
            stability_offset: 8,
        }
    }
}

/// Outcome of the three independent nonradiating tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonradiatingVerdict {
    /// `max (|α| + |β|) / ‖f‖` over modes.
    pub residual_modal: f64,
    /// `max (|f̂| + |f̌|) / ‖f‖` over directions, by direct quadrature.
    pub residual_spectral: f64,
    /// `max |u|` at the exterior probes over [`field_scale`].
    pub residual_field: f64,
    pub truncation: usize,
    pub tolerance: f64,
    pub norm_f: f64,
    pub is_nonradiating: bool,
}

/// Reference magnitude for exterior fields: `‖f‖ · ‖G(0, ·)‖_{L²(B_R)}`,
/// which bounds `|u|` near the origin by Cauchy–Schwarz.
pub fn field_scale(ctx: &WaveContext, norm_f: f64) -> Result<f64> {
    let rule = RadialRule::uniform(ctx.radius(), 4, 32)?;
    let (jac_pow, sphere) = match ctx.dimension() {
        Dimension::Two => (1, 2.0 * PI),
        Dimension::Three => (2, 4.0 * PI),
    };
    let mut total = 0.0;
    for (&r, &w) in rule.nodes().iter().zip(rule.weights()) {
        total += w * r.powi(jac_pow) * green_radial(ctx, r)?.norm_sqr();
    }
    Ok(norm_f * (sphere * total).sqrt())
}

fn field_residual(ctx: &WaveContext, coeffs: &ModalCoefficients, config: &VerdictConfig, scale: f64) -> Result<f64> {
    if scale == 0.0 {
        return Ok(0.0);
    }
    let radii: Vec<f64> = config.probe_radius_factors.iter().map(|f| f * ctx.radius()).collect();
    let mut worst = 0.0f64;
    for &r in &radii {
        let factors = outgoing_factors(ctx, coeffs.truncation(), r)?;
        for x in probe_points(ctx.dimension(), &[r], config.probe_direction_count)? {
            let [fh, _, fm, _] = exterior_from_coefficients(ctx, coeffs, &factors, &x);
            let u = (fh - fm) / (2.0 * ctx.kappa() * ctx.kappa());
            worst = worst.max(u.norm());
        }
    }
    Ok(worst / scale)
}

/// Decides whether `src` is nonradiating from modal coefficients, direct
/// transforms on `|ξ| = κ`, and the exterior field.
///
/// All three residuals must agree (all within tolerance or all above it), and
/// the modal/field decision must survive raising the truncation; otherwise an
/// [`Error::Inconsistent`] is returned.
pub fn verdict(ctx: &WaveContext, src: &SourceField, config: &VerdictConfig) -> Result<NonradiatingVerdict> {
    if !(config.tolerance.is_finite() && config.tolerance > 0.0) {
        return Err(Error::param("tolerance", "must be positive"));
    }
    if config.probe_radius_factors.iter().any(|f| !(*f > 1.0)) {
        return Err(Error::param("probe_radius_factors", "probe radii must lie outside B_R"));
    }
    let truncation = config.truncation.unwrap_or_else(|| default_truncation(ctx));
    let coeffs = modal_coefficients(ctx, src, truncation)?;
    let norm_f = coeffs.norm_f();
    if norm_f == 0.0 {
        return Ok(NonradiatingVerdict {
            residual_modal: 0.0,
            residual_spectral: 0.0,
            residual_field: 0.0,
            truncation,
            tolerance: config.tolerance,
            norm_f,
            is_nonradiating: true,
        });
    }
    let scale = field_scale(ctx, norm_f)?;
    let residual_modal = coeffs.residual();
    let residual_field = field_residual(ctx, &coeffs, config, scale)?;

    let dirs = direction_grid(ctx.dimension(), config.direction_count)?;
    let f_hat = fourier_transform_direct(ctx, src, &dirs)?;
    let f_check = laplace_transform_direct(ctx, src, &dirs)?;
    let residual_spectral = f_hat
        .iter()
        .zip(&f_check)
        .map(|(a, b)| a.norm() + b.norm())
        .fold(0.0, f64::max)
        / norm_f;

    let tol = config.tolerance;
    let flags = [residual_modal <= tol, residual_spectral <= tol, residual_field <= tol];
    if flags.iter().any(|f| *f != flags[0]) {
        return Err(Error::Inconsistent(format!(
            "residuals disagree (modal {residual_modal:e}, spectral {residual_spectral:e}, field {residual_field:e}, \
             tolerance {tol:e}); raise the truncation or the quadrature orders"
        )));
    }

    let refined = modal_coefficients(ctx, src, truncation + config.stability_offset)?;
    let refined_modal = refined.residual();
    let refined_field = field_residual(ctx, &refined, config, scale)?;
    if (refined_modal <= tol) != flags[0] || (refined_field <= tol) != flags[0] {
        return Err(Error::Inconsistent(format!(
            "verdict changes between truncation {truncation} and {}; raise the truncation",
            truncation + config.stability_offset
        )));
    }

    Ok(NonradiatingVerdict {
        residual_modal,
        residual_spectral,
        residual_field,
        truncation,
        tolerance: tol,
        norm_f,
        is_nonradiating: flags[0],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_source_has_only_mode_zero() {
        let ctx = WaveContext::new(Dimension::Two, 1.7, 1.0).unwrap();
        let c = modal_coefficients(&ctx, &SourceField::constant(&ctx, 1.0), 6).unwrap();
        for n in -6..=6 {
            if n != 0 {
                assert_eq!(c.alpha_2d(n), ZERO);
                assert_eq!(c.beta_2d(n), ZERO);
            }
        }
        assert!(c.alpha_2d(0).norm() > 0.0);
    }

    #[test]
    fn zero_source_verdict() {
        let ctx = WaveContext::new(Dimension::Three, 1.0, 1.0).unwrap();
        let v = verdict(&ctx, &SourceField::zero(&ctx), &VerdictConfig::default()).unwrap();
        assert!(v.is_nonradiating);
        assert_eq!((v.residual_modal, v.residual_spectral, v.residual_field), (0.0, 0.0, 0.0));
    }

    #[test]
    fn directions_must_be_unit() {
        assert!(unit_direction(Dimension::Two, &[1.0, 1.0]).is_err());
        assert!(unit_direction(Dimension::Three, &[1.0, 0.0]).is_err());
        assert!(unit_direction(Dimension::Two, &[0.6, 0.8]).is_ok());
    }

    #[test]
    fn zero_trace_gives_zero_functionals() {
        let ctx = WaveContext::new(Dimension::Two, 1.0, 1.0).unwrap();
        let grid = crate::quadrature::boundary_grid(&ctx, 16).unwrap();
        let t = BoundaryTrace::zeros(grid);
        let dirs = direction_grid(Dimension::Two, 8).unwrap();
        assert!(u_hat_from_trace(&ctx, &t, &dirs).unwrap().iter().all(|z| *z == ZERO));
        assert!(v_check_from_trace(&ctx, &t, &dirs).unwrap().iter().all(|z| *z == ZERO));
    }
}
