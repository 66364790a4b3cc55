//! Helmholtz, modified Helmholtz and biharmonic-wave Green's functions, their
//! addition-theorem expansions, and the regular kernel `Ψ = G − G*`.
//!
//! With `r = |x − y|`:
//!
//! * 2D: `Φ_H = (i/4) H_0^{(1)}(κr)`, `Φ_M = K_0(κr) / 2π`
//! * 3D: `Φ_H = e^{iκr} / 4πr`, `Φ_M = e^{−κr} / 4πr`
//! * `G = −(Φ_H − Φ_M) / 2κ²`, which stays bounded as `r → 0`.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::context::{azimuth, distance, norm, Dimension, WaveContext};
use crate::error::{Error, Result};
use crate::specfun::{
    bessel_i_scaled_seq, bessel_j, bessel_j_seq, bessel_k_scaled_seq, hankel1, hankel1_seq, hankel2,
    sph_bessel_i_scaled_seq, sph_bessel_j_seq, sph_bessel_k_scaled_seq, sph_hankel1_seq, SphHarmonicTable,
};

/// Below `NEAR_COINCIDENCE · R` the biharmonic kernel uses its analytic limit.
pub const NEAR_COINCIDENCE: f64 = 1e-8;

/// The three kernel values at one point pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub phi_h: Complex64,
    pub phi_m: Complex64,
    pub green: Complex64,
}

/// Prefactor `μ_d` of the far-field expansion
/// `u(x) ≈ −(μ_d / 8κ²) e^{iκ|x|} / (π|x|)^{(d−1)/2} · u_∞(x̂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FarFieldConvention {
    pub mu: Complex64,
}

impl FarFieldConvention {
    pub fn for_context(ctx: &WaveContext) -> Self {
        let mu = match ctx.dimension() {
            Dimension::Two => (2.0 / ctx.kappa()).sqrt() * Complex64::from_polar(1.0, PI / 4.0),
            Dimension::Three => Complex64::new(1.0, 0.0),
        };
        Self { mu }
    }

    /// Factor multiplying `u_∞(x̂)` in the asymptote of `u` at radius `r`.
    pub fn asymptotic_factor(&self, ctx: &WaveContext, r: f64) -> Complex64 {
        let k = ctx.kappa();
        let spread = match ctx.dimension() {
            Dimension::Two => (PI * r).sqrt(),
            Dimension::Three => PI * r,
        };
        -self.mu * Complex64::from_polar(1.0, k * r) / (8.0 * k * k * spread)
    }
}

fn separation(ctx: &WaveContext, x: &[f64], y: &[f64]) -> Result<f64> {
    ctx.check_point(x, "x")?;
    ctx.check_point(y, "y")?;
    let r = distance(x, y);
    if r == 0.0 {
        return Err(Error::Singular);
    }
    Ok(r)
}

/// `Φ_H` as a function of the separation `r > 0`.
pub fn phi_helmholtz_radial(ctx: &WaveContext, r: f64) -> Result<Complex64> {
    let k = ctx.kappa();
    match ctx.dimension() {
        Dimension::Two => Ok(Complex64::new(0.0, 0.25) * hankel1(0, k * r)?),
        Dimension::Three => Ok(Complex64::from_polar(1.0, k * r) / (4.0 * PI * r)),
    }
}

/// `Φ_M` as a function of the separation `r > 0`.
pub fn phi_modified_radial(ctx: &WaveContext, r: f64) -> Result<Complex64> {
    let t = ctx.kappa() * r;
    match ctx.dimension() {
        Dimension::Two => {
            let k0 = bessel_k_scaled_seq(0, t)?[0] * (-t).exp();
            Ok(Complex64::new(k0 / (2.0 * PI), 0.0))
        }
        Dimension::Three => Ok(Complex64::new((-t).exp() / (4.0 * PI * r), 0.0)),
    }
}

/// `Φ_H − Φ_M` at separation `r >= 0`, free of cancellation near `r = 0`.
fn helmholtz_difference(ctx: &WaveContext, r: f64) -> Result<Complex64> {
    let k = ctx.kappa();
    if r < NEAR_COINCIDENCE * ctx.radius() {
        return Ok(match ctx.dimension() {
            // log terms of Y_0 and K_0 cancel; remainder is O(r² log r)
            Dimension::Two => Complex64::new(0.0, 0.25),
            Dimension::Three => {
                let c = Complex64::new(k, k) - k * k * r + Complex64::new(1.0, -1.0) * k.powi(3) * r * r / 6.0;
                c / (4.0 * PI)
            }
        });
    }
    match ctx.dimension() {
        Dimension::Two => Ok(phi_helmholtz_radial(ctx, r)? - phi_modified_radial(ctx, r)?),
        Dimension::Three => {
            let z = k * r;
            let half = (0.5 * z).sin();
            let expm1_iz = Complex64::new(-2.0 * half * half, z.sin());
            Ok((expm1_iz - (-z).exp_m1()) / (4.0 * PI * r))
        }
    }
}

/// Helmholtz fundamental solution `Φ_H(x, y)`.
pub fn phi_helmholtz(ctx: &WaveContext, x: &[f64], y: &[f64]) -> Result<Complex64> {
    phi_helmholtz_radial(ctx, separation(ctx, x, y)?)
}

/// Modified Helmholtz fundamental solution `Φ_M(x, y)` (real, positive).
pub fn phi_modified(ctx: &WaveContext, x: &[f64], y: &[f64]) -> Result<Complex64> {
    phi_modified_radial(ctx, separation(ctx, x, y)?)
}

/// Biharmonic-wave Green's function `G = −(Φ_H − Φ_M) / 2κ²`, including
/// the coincident limit.
pub fn green_biharmonic(ctx: &WaveContext, x: &[f64], y: &[f64]) -> Result<Complex64> {
    ctx.check_point(x, "x")?;
    ctx.check_point(y, "y")?;
    let k = ctx.kappa();
    Ok(-helmholtz_difference(ctx, distance(x, y))? / (2.0 * k * k))
}

/// `G` as a function of separation.
pub fn green_radial(ctx: &WaveContext, r: f64) -> Result<Complex64> {
    let k = ctx.kappa();
    Ok(-helmholtz_difference(ctx, r)? / (2.0 * k * k))
}

/// All three kernels at a point pair.
pub fn kernel_value(ctx: &WaveContext, x: &[f64], y: &[f64]) -> Result<KernelValue> {
    let r = separation(ctx, x, y)?;
    let k = ctx.kappa();
    let phi_h = phi_helmholtz_radial(ctx, r)?;
    let phi_m = phi_modified_radial(ctx, r)?;
    let green = if r < NEAR_COINCIDENCE * ctx.radius() {
        green_radial(ctx, r)?
    } else {
        -(phi_h - phi_m) / (2.0 * k * k)
    };
    Ok(KernelValue { phi_h, phi_m, green })
}

fn require_2d(ctx: &WaveContext, what: &str) -> Result<()> {
    if ctx.dimension() != Dimension::Two {
        return Err(Error::Precondition(format!("{what} is defined for d = 2 only")));
    }
    Ok(())
}

/// `G* = −(Φ_H* − Φ_M) / 2κ²` with `Φ_H* = −(i/4) H_0^{(2)}(κr)` (2D only).
pub fn green_star(ctx: &WaveContext, x: &[f64], y: &[f64]) -> Result<Complex64> {
    require_2d(ctx, "green_star")?;
    let r = separation(ctx, x, y)?;
    let k = ctx.kappa();
    let phi_h_star = Complex64::new(0.0, -0.25) * hankel2(0, k * r)?;
    Ok(-(phi_h_star - phi_modified_radial(ctx, r)?) / (2.0 * k * k))
}

/// Regular kernel `Ψ = G − G* = −(i / 4κ²) J_0(κ|x − y|)` (2D only).
pub fn psi(ctx: &WaveContext, x: &[f64], y: &[f64]) -> Result<Complex64> {
    require_2d(ctx, "psi")?;
    ctx.check_point(x, "x")?;
    ctx.check_point(y, "y")?;
    let k = ctx.kappa();
    Ok(Complex64::new(0.0, -bessel_j(0, k * distance(x, y))? / (4.0 * k * k)))
}

/// Default multipole truncation `⌈eκ·max|y|/2⌉ + 16`.
pub fn default_truncation(ctx: &WaveContext, max_source_radius: f64) -> usize {
    (std::f64::consts::E * ctx.kappa() * max_source_radius / 2.0).ceil() as usize + 16
}

fn check_ordering(ctx: &WaveContext, x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    ctx.check_point(x, "x")?;
    ctx.check_point(y, "y")?;
    let (rx, ry) = (norm(x), norm(y));
    if rx <= ry {
        return Err(Error::Precondition(format!(
            "addition theorem needs |x| > |y|, got |x| = {rx}, |y| = {ry}"
        )));
    }
    Ok((rx, ry))
}

/// Truncated addition-theorem expansion of `Φ_H(x, y)` for `|x| > |y|`.
///
/// 2D: `(i/4) Σ_{|n|≤N} H_n^{(1)}(κ|x|) J_n(κ|y|) e^{in(arg x − arg y)}`;
/// 3D: `iκ Σ_{n≤N} h_n^{(1)}(κ|x|) j_n(κ|y|) Σ_m Y_n^m(x̂) conj(Y_n^m(ŷ))`.
pub fn phi_h_series(ctx: &WaveContext, x: &[f64], y: &[f64], truncation: usize) -> Result<Complex64> {
    let (rx, ry) = check_ordering(ctx, x, y)?;
    let k = ctx.kappa();
    match ctx.dimension() {
        Dimension::Two => {
            let h = hankel1_seq(truncation, k * rx)?;
            let j = bessel_j_seq(truncation, k * ry)?;
            let dt = azimuth(x) - azimuth(y);
            let mut sum = h[0] * j[0];
            for n in 1..=truncation {
                // H_{-n} J_{-n} = H_n J_n
                sum += h[n] * j[n] * 2.0 * (n as f64 * dt).cos();
            }
            Ok(Complex64::new(0.0, 0.25) * sum)
        }
        Dimension::Three => {
            let h = sph_hankel1_seq(truncation, k * rx)?;
            let j = sph_bessel_j_seq(truncation, k * ry)?;
            let radial: Vec<Complex64> = h.iter().zip(&j).map(|(a, b)| a * b).collect();
            Ok(Complex64::new(0.0, k) * harmonic_sum(truncation, x, y, &radial))
        }
    }
}

/// Truncated addition-theorem expansion of `Φ_M(x, y)` for `|x| > |y|`.
///
/// 2D: `(1/2π) Σ K_n(κ|x|) I_n(κ|y|) e^{inΔθ}` (the `H_n^{(1)}(iκ|x|)
/// J_n(iκ|y|)` form with the imaginary-argument relations applied);
/// 3D: `−κ Σ h_n^{(1)}(iκ|x|) j_n(iκ|y|) Y Ȳ = (2κ/π) Σ k_n(κ|x|) i_n(κ|y|) Y Ȳ`.
pub fn phi_m_series(ctx: &WaveContext, x: &[f64], y: &[f64], truncation: usize) -> Result<Complex64> {
    let (rx, ry) = check_ordering(ctx, x, y)?;
    let k = ctx.kappa();
    let (a, b) = (k * rx, k * ry);
    let decay = (b - a).exp();
    match ctx.dimension() {
        Dimension::Two => {
            let ks = bessel_k_scaled_seq(truncation, a)?;
            let is = bessel_i_scaled_seq(truncation, b)?;
            let dt = azimuth(x) - azimuth(y);
            let mut sum = ks[0] * is[0];
            for n in 1..=truncation {
                sum += 2.0 * ks[n] * is[n] * (n as f64 * dt).cos();
            }
            Ok(Complex64::new(sum * decay / (2.0 * PI), 0.0))
        }
        Dimension::Three => {
            let ks = sph_bessel_k_scaled_seq(truncation, a)?;
            let is = sph_bessel_i_scaled_seq(truncation, b)?;
            let radial: Vec<Complex64> =
                ks.iter().zip(&is).map(|(p, q)| Complex64::new(p * q * decay, 0.0)).collect();
            Ok(2.0 * k / PI * harmonic_sum(truncation, x, y, &radial))
        }
    }
}

/// `Σ_n radial[n] Σ_m Y_n^m(x̂) conj(Y_n^m(ŷ))`.
fn harmonic_sum(truncation: usize, x: &[f64], y: &[f64], radial: &[Complex64]) -> Complex64 {
    let nmax = truncation as u32;
    let yx = SphHarmonicTable::for_direction(nmax, x);
    let yy = SphHarmonicTable::for_direction(nmax, y);
    let mut total = Complex64::new(0.0, 0.0);
    for (n, rad) in radial.iter().enumerate() {
        let n = n as u32;
        let mut s = Complex64::new(0.0, 0.0);
        for m in -(n as i32)..=n as i32 {
            s += yx.get(n, m) * yy.get(n, m).conj();
        }
        total += rad * s;
    }
    total
}
