//! Radiated fields `u`, `f_H`, `f_M` (2D) / `g_H`, `g_M` (3D), boundary
//! traces on `∂B_R` and far-field patterns.
//!
//! With `f_H = −∫Φ_H f` and `f_M = −∫Φ_M f` the field is
//! `u = (f_H − f_M) / 2κ²`. Outside the support `Δf_H = −κ² f_H` and
//! `Δf_M = κ² f_M`, hence `Δu = −(f_H + f_M) / 2` there.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::context::{azimuth, norm, Dimension, WaveContext};
use crate::error::{Error, Result};
use crate::kernels::{phi_helmholtz_radial, phi_modified_radial};
use crate::quadrature::{BoundaryGrid, RadialRule};
use crate::sources::{ModalProfiles, SourceField, SourceKind};
use crate::spectral::{default_truncation, modal_coefficients, ModalCoefficients};
use crate::specfun::{
    bessel_i_scaled_seq, bessel_j_seq, bessel_k_scaled_seq, hankel1_seq, i_pow, sph_bessel_i_scaled_seq,
    sph_bessel_j_seq, sph_bessel_k_scaled_seq, sph_hankel1_seq, SphHarmonicTable,
};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Field values at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub point: Vec<f64>,
    pub u: Complex64,
    pub f_h: Complex64,
    pub f_m: Complex64,
}

impl FieldSample {
    fn new(ctx: &WaveContext, point: &[f64], f_h: Complex64, f_m: Complex64) -> Self {
        let k2 = ctx.kappa() * ctx.kappa();
        Self {
            point: point.to_vec(),
            u: (f_h - f_m) / (2.0 * k2),
            f_h,
            f_m,
        }
    }
}

/// Near-field data `(u, ∂_ν u, Δu, ∂_ν Δu)` at the nodes of a boundary grid.
#[derive(Debug, Clone)]
pub struct BoundaryTrace {
    pub grid: BoundaryGrid,
    pub u: Vec<Complex64>,
    pub du_dnu: Vec<Complex64>,
    pub lap_u: Vec<Complex64>,
    pub dlap_u_dnu: Vec<Complex64>,
}

impl BoundaryTrace {
    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// All-zero data on `grid`.
    pub fn zeros(grid: BoundaryGrid) -> Self {
        let n = grid.len();
        Self {
            grid,
            u: vec![ZERO; n],
            du_dnu: vec![ZERO; n],
            lap_u: vec![ZERO; n],
            dlap_u_dnu: vec![ZERO; n],
        }
    }

    /// Entrywise `c · self`.
    pub fn scaled(&self, c: Complex64) -> Self {
        let s = |v: &[Complex64]| v.iter().map(|z| c * z).collect();
        Self {
            grid: self.grid.clone(),
            u: s(&self.u),
            du_dnu: s(&self.du_dnu),
            lap_u: s(&self.lap_u),
            dlap_u_dnu: s(&self.dlap_u_dnu),
        }
    }

    /// Largest entrywise difference over all four channels.
    pub fn max_discrepancy(&self, other: &Self) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::Precondition("traces live on different grids".into()));
        }
        let channels = [
            (&self.u, &other.u),
            (&self.du_dnu, &other.du_dnu),
            (&self.lap_u, &other.lap_u),
            (&self.dlap_u_dnu, &other.dlap_u_dnu),
        ];
        Ok(channels
            .iter()
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max))
    }

    /// Largest magnitude over all four channels.
    pub fn max_abs(&self) -> f64 {
        [&self.u, &self.du_dnu, &self.lap_u, &self.dlap_u_dnu]
            .iter()
            .flat_map(|v| v.iter().map(|z| z.norm()))
            .fold(0.0, f64::max)
    }
}

/// Far-field pattern value in one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldSample {
    pub direction: Vec<f64>,
    pub u_inf: Complex64,
}

fn check_ctx(ctx: &WaveContext, src: &SourceField) -> Result<()> {
    if ctx != src.ctx() {
        return Err(Error::Precondition("source was built for a different wave context".into()));
    }
    Ok(())
}

/// Outgoing radial factors and their radial derivatives at radius `rho`, for
/// orders `0..=truncation`, with the constants of the modal field formulas:
///
/// 2D: `f_H = Σ α_n h_n e^{inθ}`, `h_n = −(iπ/2) H_n(κρ)`;
///     `f_M = Σ i^{−n} β_n m_n e^{inθ}`, `m_n = −K_n(κρ)`.
/// 3D: `h_n = −iκ h_n^{(1)}(κρ)`, `m_n = −(2κ/π) k_n(κρ)`, angular factor `Y_n^m`.
#[derive(Debug, Clone)]
pub(crate) struct OutgoingFactors {
    pub h: Vec<Complex64>,
    pub dh: Vec<Complex64>,
    pub m: Vec<f64>,
    pub dm: Vec<f64>,
}

pub(crate) fn outgoing_factors(ctx: &WaveContext, truncation: usize, rho: f64) -> Result<OutgoingFactors> {
    let k = ctx.kappa();
    let z = k * rho;
    let decay = (-z).exp();
    // one extra order for the derivative recurrences
    let top = truncation + 1;
    let (h_seq, scaled, prefix_h, prefix_m): (Vec<Complex64>, Vec<f64>, Complex64, f64) = match ctx.dimension() {
        Dimension::Two => (
            hankel1_seq(top, z)?,
            bessel_k_scaled_seq(top, z)?,
            Complex64::new(0.0, -PI / 2.0),
            -1.0,
        ),
        Dimension::Three => (
            sph_hankel1_seq(top, z)?,
            sph_bessel_k_scaled_seq(top, z)?,
            Complex64::new(0.0, -k),
            -2.0 * k / PI,
        ),
    };
    let mut out = OutgoingFactors {
        h: Vec::with_capacity(truncation + 1),
        dh: Vec::with_capacity(truncation + 1),
        m: Vec::with_capacity(truncation + 1),
        dm: Vec::with_capacity(truncation + 1),
    };
    for n in 0..=truncation {
        let nz = n as f64 / z;
        // H_n' = (n/z) H_n − H_{n+1}; the same form holds for h_n, K_n and k_n
        // (with K_n' = (n/z)K_n − K_{n+1} and k_n' = (n/z)k_n − k_{n+1}).
        let dh = nz * h_seq[n] - h_seq[n + 1];
        let km = scaled[n] * decay;
        let dkm = (nz * scaled[n] - scaled[n + 1]) * decay;
        out.h.push(prefix_h * h_seq[n]);
        out.dh.push(prefix_h * k * dh);
        out.m.push(prefix_m * km);
        out.dm.push(prefix_m * k * dkm);
    }
    Ok(out)
}

/// `(f_H, ∂_r f_H, f_M, ∂_r f_M)` at `x` with `|x|` outside the support,
/// synthesized from modal coefficients.
pub(crate) fn exterior_from_coefficients(
    ctx: &WaveContext,
    coeffs: &ModalCoefficients,
    factors: &OutgoingFactors,
    x: &[f64],
) -> [Complex64; 4] {
    let nmax = coeffs.truncation();
    let mut acc = [ZERO; 4];
    match ctx.dimension() {
        Dimension::Two => {
            let theta = azimuth(x);
            for n in -(nmax as i32)..=nmax as i32 {
                let a = n.unsigned_abs() as usize;
                let e = Complex64::from_polar(1.0, n as f64 * theta);
                // H_{−n} = (−1)^n H_n, K_{−n} = K_n
                let sign = if n < 0 && a % 2 == 1 { -1.0 } else { 1.0 };
                let alpha = coeffs.alpha_2d(n) * e * sign;
                let beta = coeffs.beta_2d(n) * i_pow(-n) * e;
                acc[0] += alpha * factors.h[a];
                acc[1] += alpha * factors.dh[a];
                acc[2] += beta * factors.m[a];
                acc[3] += beta * factors.dm[a];
            }
        }
        Dimension::Three => {
            let table = SphHarmonicTable::for_direction(nmax as u32, x);
            for n in 0..=nmax {
                let rot = i_pow(-(n as i32));
                for m in -(n as i32)..=n as i32 {
                    let y = table.get(n as u32, m);
                    let alpha = coeffs.alpha_3d(n as u32, m) * y;
                    let beta = coeffs.beta_3d(n as u32, m) * rot * y;
                    acc[0] += alpha * factors.h[n];
                    acc[1] += alpha * factors.dh[n];
                    acc[2] += beta * factors.m[n];
                    acc[3] += beta * factors.dm[n];
                }
            }
        }
    }
    acc
}

/// Field from modal coefficients at a point outside the support.
pub fn field_from_coefficients(ctx: &WaveContext, coeffs: &ModalCoefficients, x: &[f64]) -> Result<FieldSample> {
    ctx.check_point(x, "x")?;
    let rho = norm(x);
    if rho == 0.0 {
        return Err(Error::Precondition("modal exterior field needs |x| > 0".into()));
    }
    let factors = outgoing_factors(ctx, coeffs.truncation(), rho)?;
    let [f_h, _, f_m, _] = exterior_from_coefficients(ctx, coeffs, &factors, x);
    Ok(FieldSample::new(ctx, x, f_h, f_m))
}

/// `u(x) = ∫ G(x, y) f(y) dy` together with `f_H`, `f_M`.
///
/// Modal sources use the addition-theorem series, split at `|x|` when `x`
/// lies inside the support, and accept any `x ≠ 0`. Pointwise and grid
/// sources use direct quadrature and require `|x| > support_radius`; that path
/// loses accuracy when `x` is within a few quadrature spacings of the support.
pub fn eval_field(ctx: &WaveContext, src: &SourceField, x: &[f64]) -> Result<FieldSample> {
    check_ctx(ctx, src)?;
    ctx.check_point(x, "x")?;
    match src.kind() {
        SourceKind::Modal(modes) => eval_field_modal(ctx, src, modes, x),
        _ => eval_field_direct(ctx, src, x),
    }
}

/// Direct product quadrature of `−∫Φ_H f` and `−∫Φ_M f`.
pub fn eval_field_direct(ctx: &WaveContext, src: &SourceField, x: &[f64]) -> Result<FieldSample> {
    check_ctx(ctx, src)?;
    ctx.check_point(x, "x")?;
    if norm(x) <= src.support_radius() {
        return Err(Error::Precondition(format!(
            "direct field evaluation needs |x| > support radius {}, got {}",
            src.support_radius(),
            norm(x)
        )));
    }
    let grid = src.grid_samples()?;
    let na = grid.rule.angular().len();
    let (mut f_h, mut f_m) = (ZERO, ZERO);
    for (idx, v) in grid.values.iter().enumerate() {
        if *v == ZERO {
            continue;
        }
        let (i, j) = (idx / na, idx % na);
        let y = grid.rule.point(i, j);
        let r: f64 = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let w = grid.rule.weight(i, j) * v;
        f_h -= w * phi_helmholtz_radial(ctx, r)?;
        f_m -= w * phi_modified_radial(ctx, r)?;
    }
    Ok(FieldSample::new(ctx, x, f_h, f_m))
}

/// Radial kernels of the split addition theorem for one order: regular
/// (`J_n`/`j_n`, `I_n`/`i_n`) and outgoing (`H_n`/`h_n`, `K_n`/`k_n`) values
/// at a radius, with the modified pair kept unscaled.
struct SplitKernels {
    reg_h: Vec<f64>,
    reg_m: Vec<f64>,
    out_h: Vec<Complex64>,
    out_m: Vec<f64>,
}

fn split_kernels(ctx: &WaveContext, nmax: usize, r: f64, need_outgoing: bool) -> Result<SplitKernels> {
    let t = ctx.kappa() * r;
    let grow = t.exp();
    let (reg_h, reg_m) = match ctx.dimension() {
        Dimension::Two => (bessel_j_seq(nmax, t)?, bessel_i_scaled_seq(nmax, t)?),
        Dimension::Three => (sph_bessel_j_seq(nmax, t)?, sph_bessel_i_scaled_seq(nmax, t)?),
    };
    let reg_m = reg_m.into_iter().map(|v| v * grow).collect();
    let (out_h, out_m) = if need_outgoing {
        match ctx.dimension() {
            Dimension::Two => (hankel1_seq(nmax, t)?, bessel_k_scaled_seq(nmax, t)?),
            Dimension::Three => (sph_hankel1_seq(nmax, t)?, sph_bessel_k_scaled_seq(nmax, t)?),
        }
    } else {
        (Vec::new(), Vec::new())
    };
    let out_m = out_m.into_iter().map(|v| v / grow).collect();
    Ok(SplitKernels {
        reg_h,
        reg_m,
        out_h,
        out_m,
    })
}

fn eval_field_modal(ctx: &WaveContext, src: &SourceField, modes: &ModalProfiles, x: &[f64]) -> Result<FieldSample> {
    let rho = norm(x);
    if rho == 0.0 {
        return Err(Error::Precondition("modal field evaluation needs |x| > 0".into()));
    }
    let nmax = modes.max_order();
    let support = src.support_radius();
    // radial rule over the support, with a panel break at |x| when inside
    let mut breaks: Vec<f64> = src.breakpoints().to_vec();
    if rho < support {
        breaks.push(rho);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
    }
    let disc = src.discretization();
    let mut fine = Vec::new();
    for pair in breaks.windows(2) {
        for p in 0..disc.radial_panels {
            fine.push(pair[0] + (pair[1] - pair[0]) * p as f64 / disc.radial_panels as f64);
        }
    }
    fine.push(support);
    let rule = RadialRule::composite(&fine, disc.radial_order)?;
    let (k, dim) = (ctx.kappa(), ctx.dimension());
    let jac = |r: f64| if dim == Dimension::Two { r } else { r * r };

    // inner[n] = ∫_0^ρ f_n (J_n, I_n) r^{d−1} dr, outer[n] = ∫_ρ^s f_n (H_n, K_n) r^{d−1} dr
    let count = match modes {
        ModalProfiles::Cylindrical(m) => m.len(),
        ModalProfiles::Spherical(m) => m.len(),
    };
    let mut inner_h = vec![ZERO; count];
    let mut inner_m = vec![ZERO; count];
    let mut outer_h = vec![ZERO; count];
    let mut outer_m = vec![ZERO; count];
    let orders: Vec<usize> = match modes {
        ModalProfiles::Cylindrical(m) => m.keys().map(|k| k.0.unsigned_abs() as usize).collect(),
        ModalProfiles::Spherical(m) => m.keys().map(|k| k.n as usize).collect(),
    };
    let profiles: Vec<_> = match modes {
        ModalProfiles::Cylindrical(m) => m.values().cloned().collect(),
        ModalProfiles::Spherical(m) => m.values().cloned().collect(),
    };
    for (&r, &w) in rule.nodes().iter().zip(rule.weights()) {
        let is_inner = r < rho;
        let kern = split_kernels(ctx, nmax, r, !is_inner)?;
        let wj = w * jac(r);
        for (idx, p) in profiles.iter().enumerate() {
            let f = p.eval(r) * wj;
            let n = orders[idx];
            if is_inner {
                inner_h[idx] += f * kern.reg_h[n];
                inner_m[idx] += f * kern.reg_m[n];
            } else {
                outer_h[idx] += f * kern.out_h[n];
                outer_m[idx] += f * kern.out_m[n];
            }
        }
    }
    let at_x = split_kernels(ctx, nmax, rho, true)?;
    let (mut f_h, mut f_m) = (ZERO, ZERO);
    match modes {
        ModalProfiles::Cylindrical(m) => {
            let theta = azimuth(x);
            for (idx, key) in m.keys().enumerate() {
                let n = key.0;
                let a = n.unsigned_abs() as usize;
                // negative orders: H_{−n} J_{−n} = H_n J_n, K and I are even in n
                let e = Complex64::from_polar(1.0, n as f64 * theta);
                f_h += e * (at_x.out_h[a] * inner_h[idx] + at_x.reg_h[a] * outer_h[idx]);
                f_m += e * (at_x.out_m[a] * inner_m[idx] + at_x.reg_m[a] * outer_m[idx]);
            }
            f_h *= Complex64::new(0.0, -PI / 2.0);
            f_m *= -1.0;
        }
        ModalProfiles::Spherical(m) => {
            let table = SphHarmonicTable::for_direction(nmax as u32, x);
            for (idx, key) in m.keys().enumerate() {
                let n = key.n as usize;
                let y = table.get(key.n, key.m);
                f_h += y * (at_x.out_h[n] * inner_h[idx] + at_x.reg_h[n] * outer_h[idx]);
                f_m += y * (at_x.out_m[n] * inner_m[idx] + at_x.reg_m[n] * outer_m[idx]);
            }
            f_h *= Complex64::new(0.0, -k);
            // Φ_M = (2κ/π) Σ k_n i_n Y Ȳ
            f_m *= -2.0 * k / PI;
        }
    }
    Ok(FieldSample::new(ctx, x, f_h, f_m))
}

/// Truncation used when a caller does not fix one: the source's own modes
/// for modal sources, otherwise the spectral default.
pub fn natural_truncation(ctx: &WaveContext, src: &SourceField) -> usize {
    match src.kind() {
        SourceKind::Modal(m) => m.max_order(),
        _ => default_truncation(ctx),
    }
}

/// Near-field data on `grid` (its radius must be at least the support radius).
pub fn boundary_trace(ctx: &WaveContext, src: &SourceField, grid: &BoundaryGrid) -> Result<BoundaryTrace> {
    boundary_trace_with_truncation(ctx, src, grid, natural_truncation(ctx, src))
}

pub fn boundary_trace_with_truncation(
    ctx: &WaveContext,
    src: &SourceField,
    grid: &BoundaryGrid,
    truncation: usize,
) -> Result<BoundaryTrace> {
    check_ctx(ctx, src)?;
    if src.support_radius() > grid.radius() * (1.0 + 1e-14) {
        return Err(Error::Support(format!(
            "support radius {} exceeds the trace radius {}",
            src.support_radius(),
            grid.radius()
        )));
    }
    let coeffs = modal_coefficients(ctx, src, truncation)?;
    trace_from_coefficients(ctx, &coeffs, grid)
}

/// Near-field data synthesized from modal coefficients.
pub fn trace_from_coefficients(ctx: &WaveContext, coeffs: &ModalCoefficients, grid: &BoundaryGrid) -> Result<BoundaryTrace> {
    let factors = outgoing_factors(ctx, coeffs.truncation(), grid.radius())?;
    let k2 = ctx.kappa() * ctx.kappa();
    let mut trace = BoundaryTrace::zeros(grid.clone());
    for (idx, x) in grid.points().iter().enumerate() {
        let [fh, dfh, fm, dfm] = exterior_from_coefficients(ctx, coeffs, &factors, x);
        trace.u[idx] = (fh - fm) / (2.0 * k2);
        trace.du_dnu[idx] = (dfh - dfm) / (2.0 * k2);
        trace.lap_u[idx] = -(fh + fm) / 2.0;
        trace.dlap_u_dnu[idx] = -(dfh + dfm) / 2.0;
    }
    Ok(trace)
}

/// Far-field pattern `u_∞(x̂) = f̂(κx̂)`, so that
/// `u(x) ≈ −(μ_d / 8κ²) e^{iκ|x|} / (π|x|)^{(d−1)/2} · u_∞(x̂)`.
pub fn far_field(ctx: &WaveContext, src: &SourceField, direction: &[f64]) -> Result<FarFieldSample> {
    Ok(far_fields(ctx, src, &[direction.to_vec()])?.remove(0))
}

/// [`far_field`] for many directions with one modal projection.
pub fn far_fields(ctx: &WaveContext, src: &SourceField, directions: &[Vec<f64>]) -> Result<Vec<FarFieldSample>> {
    check_ctx(ctx, src)?;
    let coeffs = modal_coefficients(ctx, src, natural_truncation(ctx, src))?;
    let values = coeffs.fourier_on_circle(directions)?;
    Ok(directions
        .iter()
        .zip(values)
        .map(|(d, u_inf)| FarFieldSample {
            direction: d.iter().map(|c| c / norm(d)).collect(),
            u_inf,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::make_2d_bessel_nonradiating;

    #[test]
    fn zero_source_has_zero_field() {
        let ctx = WaveContext::new(Dimension::Two, 1.5, 1.0).unwrap();
        let z = SourceField::zero(&ctx);
        let s = eval_field(&ctx, &z, &[2.0, 0.0]).unwrap();
        assert_eq!((s.u, s.f_h, s.f_m), (ZERO, ZERO, ZERO));
    }

    #[test]
    fn split_invariant_holds() {
        let ctx = WaveContext::new(Dimension::Three, 1.2, 1.0).unwrap();
        let src = SourceField::gaussian(&ctx, &[0.1, 0.2, -0.1], 0.3, 1.0).unwrap();
        let s = eval_field(&ctx, &src, &[0.0, 1.5, 0.5]).unwrap();
        let k2 = 1.44;
        assert!((s.u - (s.f_h - s.f_m) / (2.0 * k2)).norm() <= 1e-12 * s.u.norm());
    }

    #[test]
    fn interior_and_exterior_series_meet_at_support() {
        let ctx = WaveContext::from_root(Dimension::Two, 1.0, 1).unwrap();
        let src = SourceField::constant(&ctx, 1.0).with_breakpoints(&[0.5]).unwrap();
        let inside = eval_field(&ctx, &src, &[0.999_999_9, 0.0]).unwrap();
        let outside = eval_field(&ctx, &src, &[1.000_000_1, 0.0]).unwrap();
        assert!((inside.u - outside.u).norm() < 1e-6 * outside.u.norm());
    }

    #[test]
    fn nonradiating_trace_vanishes() {
        let ctx = WaveContext::from_root(Dimension::Two, 1.0, 1).unwrap();
        let src = make_2d_bessel_nonradiating(&ctx).unwrap();
        let grid = crate::quadrature::boundary_grid(&ctx, 32).unwrap();
        let t = boundary_trace(&ctx, &src, &grid).unwrap();
        assert!(t.max_abs() < 1e-8 * src.l2_norm().unwrap());
    }
}
