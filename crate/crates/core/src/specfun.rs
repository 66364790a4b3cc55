//! Cylindrical and spherical Bessel/Hankel families for real and purely
//! imaginary arguments, plus orthonormal spherical harmonics.
//!
//! Conventions:
//!
//! * `J_n` is computed by Miller's backward recurrence normalized with
//!   `J_0 + 2 Σ J_{2k} = 1`; `Y_0`, `Y_1` come from Neumann's expansions in
//!   terms of those `J_k`, and higher `Y_n` from upward recurrence. Above
//!   `z = 30` the order-0/1 seeds come from Hankel's asymptotic expansion.
//! * Imaginary arguments are always routed through `I_n` / `K_n`:
//!   `J_n(it) = i^n I_n(t)` and `H_n^{(1)}(it) = (2/π) i^{-(n+1)} K_n(t)`;
//!   spherically `j_n(it) = i^n i_n(t)` and `h_n^{(1)}(it) = -(2/π) i^{-n} k_n(t)`
//!   with `i_n = sqrt(π/2t) I_{n+1/2}` and `k_n = sqrt(π/2t) K_{n+1/2}`.
//! * Spherical harmonics are orthonormal on the unit sphere and carry the
//!   Condon–Shortley phase: `Y_1^1 = -sqrt(3/8π) sin θ e^{iφ}`.
//!
//! The `_scaled` sequences return `e^{-t} I_n(t)` and `e^{t} K_n(t)` (and the
//! spherical analogues) so that callers can recombine exponentials without
//! overflow or underflow.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Above this argument the order-0/1 cylindrical seeds use Hankel's expansion.
const ASYMPTOTIC_SWITCH: f64 = 30.0;

/// Largest `t` for which `e^t` is finite.
pub const EXP_OVERFLOW_THRESHOLD: f64 = 709.782_712_893_384;

/// Cylindrical order `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeIndex2D(pub i32);

/// Spherical degree `n` and order `m`, `-n <= m <= n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeIndex3D {
    pub n: u32,
    pub m: i32,
}

impl ModeIndex3D {
    pub fn new(n: u32, m: i32) -> Result<Self> {
        if m.unsigned_abs() > n {
            return Err(Error::Index(format!("|m| = {} exceeds degree n = {n}", m.abs())));
        }
        Ok(Self { n, m })
    }

    /// Position in the flattened `n^2 + n + m` layout.
    pub fn linear(&self) -> usize {
        let n = self.n as i64;
        (n * n + n + self.m as i64) as usize
    }

    /// All indices with degree `<= nmax`, in linear order.
    pub fn all(nmax: u32) -> impl Iterator<Item = ModeIndex3D> {
        (0..=nmax).flat_map(|n| (-(n as i32)..=n as i32).map(move |m| ModeIndex3D { n, m }))
    }
}

/// A special-function value with a loss-of-precision indicator.
///
/// `condition_estimate` is the ratio between the largest intermediate
/// magnitude the recurrence combined and the returned magnitude; values near
/// 1 mean full relative precision, large values flag cancellation (typically
/// close to a zero of an oscillatory function).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialValue {
    pub value: Complex64,
    pub condition_estimate: f64,
}

/// Function families addressable through [`evaluate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialFunction {
    BesselJ,
    BesselY,
    Hankel1,
    Hankel2,
    BesselJImag,
    Hankel1Imag,
    SphBesselJ,
    SphBesselY,
    SphHankel1,
    SphBesselJImag,
    SphHankel1Imag,
}

/// `i^n` for any integer `n`.
pub fn i_pow(n: i32) -> Complex64 {
    match n.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn parity(n: i32) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn check_arg(z: f64, allow_zero: bool, what: &str) -> Result<()> {
    if !z.is_finite() {
        return Err(Error::Domain(format!("{what}: argument must be finite, got {z}")));
    }
    if z < 0.0 || (!allow_zero && z == 0.0) {
        return Err(Error::Domain(format!(
            "{what}: argument must be {}, got {z}",
            if allow_zero { "non-negative" } else { "positive" }
        )));
    }
    Ok(())
}

/// Start index for backward recurrences covering orders `0..=nmax` at argument `z`.
fn miller_start(nmax: usize, z: f64) -> usize {
    let top = (nmax as f64).max(z);
    let m = top.ceil() as usize + 24 + (8.0 * top.max(1.0).sqrt()).ceil() as usize;
    m + (m % 2)
}

const RESCALE_LIMIT: f64 = 1e250;

// ---------------------------------------------------------------------------
// Cylindrical functions of real argument
// ---------------------------------------------------------------------------

/// Hankel's large-argument expansion of `H_ν^{(1)}(z)`.
fn hankel1_asymptotic(nu: f64, z: f64) -> Complex64 {
    let mu = 4.0 * nu * nu;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= Complex64::new(0.0, (mu - odd * odd) / (8.0 * kf * z));
        let mag = term.norm();
        if mag >= prev {
            break;
        }
        sum += term;
        if mag < 1e-17 * sum.norm() {
            break;
        }
        prev = mag;
    }
    let phase = Complex64::new(z.cos(), z.sin()) * Complex64::from_polar(1.0, -(nu * PI / 2.0 + PI / 4.0));
    (2.0 / (PI * z)).sqrt() * phase * sum
}

/// Unnormalized backward recurrence for J from index `m` down to `stop`,
/// returning entries `stop..=m` (index offset by `stop`).
fn j_backward(m: usize, stop: usize, z: f64) -> Vec<f64> {
    let mut v = vec![0.0; m + 2 - stop];
    v[m - stop] = 1e-30;
    for k in (stop + 1..=m).rev() {
        let next = 2.0 * k as f64 / z * v[k - stop] - v[k + 1 - stop];
        v[k - 1 - stop] = next;
        if next.abs() > RESCALE_LIMIT {
            for e in v.iter_mut() {
                *e /= RESCALE_LIMIT;
            }
        }
    }
    v.truncate(m + 1 - stop);
    v
}

/// Miller's algorithm: all `J_k(z)` for `k = 0..=m` (m from [`miller_start`]).
fn j_miller_full(nmax: usize, z: f64) -> Vec<f64> {
    let m = miller_start(nmax, z);
    let mut v = j_backward(m, 0, z);
    let mut norm = v[0];
    for k in (2..=m).step_by(2) {
        norm += 2.0 * v[k];
    }
    for e in v.iter_mut() {
        *e /= norm;
    }
    v
}

/// `J_k(z)` for `k = 0..=nmax`, `z >= 0`.
pub fn bessel_j_seq(nmax: usize, z: f64) -> Result<Vec<f64>> {
    check_arg(z, true, "bessel_j")?;
    if z == 0.0 {
        let mut v = vec![0.0; nmax + 1];
        v[0] = 1.0;
        return Ok(v);
    }
    if z <= ASYMPTOTIC_SWITCH {
        let mut v = j_miller_full(nmax, z);
        v.truncate(nmax + 1);
        return Ok(v);
    }
    let h0 = hankel1_asymptotic(0.0, z);
    let h1 = hankel1_asymptotic(1.0, z);
    let mut v = vec![0.0; nmax + 1];
    v[0] = h0.re;
    if nmax == 0 {
        return Ok(v);
    }
    v[1] = h1.re;
    // Upward recurrence is stable while k < z.
    let k_up = (z.floor() as usize).min(nmax);
    for k in 1..k_up {
        v[k + 1] = 2.0 * k as f64 / z * v[k] - v[k - 1];
    }
    if nmax > k_up {
        // Backward sequence proportional to J above the turning point, matched
        // in least squares on the two entries k_up - 1, k_up.
        let m = miller_start(nmax, z);
        let b = j_backward(m, k_up - 1, z);
        let (b0, b1) = (b[0], b[1]);
        let scale = (v[k_up - 1] * b0 + v[k_up] * b1) / (b0 * b0 + b1 * b1);
        for k in k_up + 1..=nmax {
            v[k] = scale * b[k - (k_up - 1)];
        }
    }
    Ok(v)
}

/// `Y_k(z)` for `k = 0..=nmax`, `z > 0`.
pub fn bessel_y_seq(nmax: usize, z: f64) -> Result<Vec<f64>> {
    check_arg(z, false, "bessel_y")?;
    let (y0, y1) = if z <= ASYMPTOTIC_SWITCH {
        let j = j_miller_full(1, z);
        let l = (z / 2.0).ln() + EULER_GAMMA;
        let mut s0 = 0.0;
        let mut s1 = 0.0;
        let mut k = 1usize;
        while 2 * k + 1 < j.len() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let kf = k as f64;
            s0 += sign * j[2 * k] / kf;
            s1 += sign * (1.0 + 2.0 * kf) * j[2 * k + 1] / (kf * (1.0 + kf));
            k += 1;
        }
        let y0 = 2.0 / PI * (l * j[0] - 2.0 * s0);
        let y1 = -2.0 / (PI * z) * j[0] + 2.0 / PI * ((l - 1.0) * j[1] - s1);
        (y0, y1)
    } else {
        (hankel1_asymptotic(0.0, z).im, hankel1_asymptotic(1.0, z).im)
    };
    let mut v = vec![0.0; nmax + 1];
    v[0] = y0;
    if nmax >= 1 {
        v[1] = y1;
    }
    for k in 1..nmax {
        v[k + 1] = 2.0 * k as f64 / z * v[k] - v[k - 1];
    }
    Ok(v)
}

/// `H_k^{(1)}(z)` for `k = 0..=nmax`.
pub fn hankel1_seq(nmax: usize, z: f64) -> Result<Vec<Complex64>> {
    if z == 0.0 {
        return Err(Error::Domain("hankel1: logarithmic singularity at z = 0".into()));
    }
    let j = bessel_j_seq(nmax, z)?;
    let y = bessel_y_seq(nmax, z)?;
    Ok(j.into_iter().zip(y).map(|(a, b)| Complex64::new(a, b)).collect())
}

/// `J_n(z)` for integer `n` and `z >= 0`.
pub fn bessel_j(n: i32, z: f64) -> Result<f64> {
    let seq = bessel_j_seq(n.unsigned_abs() as usize, z)?;
    Ok(parity(n.min(0)) * seq[n.unsigned_abs() as usize])
}

/// `Y_n(z)` for integer `n` and `z > 0`.
pub fn bessel_y(n: i32, z: f64) -> Result<f64> {
    let seq = bessel_y_seq(n.unsigned_abs() as usize, z)?;
    Ok(parity(n.min(0)) * seq[n.unsigned_abs() as usize])
}

/// `H_n^{(1)}(z) = J_n(z) + i Y_n(z)`.
pub fn hankel1(n: i32, z: f64) -> Result<Complex64> {
    if z == 0.0 {
        return Err(Error::Domain("hankel1: logarithmic singularity at z = 0".into()));
    }
    Ok(Complex64::new(bessel_j(n, z)?, bessel_y(n, z)?))
}

/// `H_n^{(2)}(z) = J_n(z) - i Y_n(z)`.
pub fn hankel2(n: i32, z: f64) -> Result<Complex64> {
    hankel1(n, z).map(|h| h.conj())
}

/// k-th positive zero of `J_0` (k >= 1), by Newton iteration from McMahon's estimate.
pub fn bessel_j0_zero(k: u32) -> f64 {
    let beta = (k as f64 - 0.25) * PI;
    let b8 = 8.0 * beta;
    let mut z = beta + 1.0 / b8 - 124.0 / (3.0 * b8.powi(3));
    for _ in 0..50 {
        let j = bessel_j_seq(1, z).expect("positive argument");
        let step = j[0] / j[1];
        z += step;
        if step.abs() < 1e-16 * z {
            break;
        }
    }
    z
}

// ---------------------------------------------------------------------------
// Modified cylindrical functions (imaginary argument)
// ---------------------------------------------------------------------------

/// `e^{-t} I_k(t)` for `k = 0..=nmax`, `t >= 0`.
pub fn bessel_i_scaled_seq(nmax: usize, t: f64) -> Result<Vec<f64>> {
    check_arg(t, true, "bessel_i")?;
    let mut out = vec![0.0; nmax + 1];
    if t == 0.0 {
        out[0] = 1.0;
        return Ok(out);
    }
    let m = miller_start(nmax, t) + (4.0 * t.sqrt()) as usize * 2;
    let mut v = vec![0.0; m + 2];
    v[m] = 1e-30;
    for k in (1..=m).rev() {
        v[k - 1] = 2.0 * k as f64 / t * v[k] + v[k + 1];
        if v[k - 1] > RESCALE_LIMIT {
            for e in v.iter_mut() {
                *e /= RESCALE_LIMIT;
            }
        }
    }
    // e^{t} = I_0 + 2 Σ_{k>=1} I_k
    let norm = v[0] + 2.0 * v[1..=m].iter().sum::<f64>();
    for k in 0..=nmax {
        out[k] = v[k] / norm;
    }
    Ok(out)
}

/// Power series for `I_0`, `I_1` and the companion sums giving `K_0`, `K_1` at small `t`.
fn k01_series(t: f64) -> (f64, f64) {
    let q = t * t / 4.0;
    let l = (t / 2.0).ln();
    let mut i0 = 0.0;
    let mut i1 = 0.0;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut term0 = 1.0; // q^k / (k!)^2
    let mut term1 = 1.0; // q^k / (k! (k+1)!)
    let mut harmonic = 0.0; // H_k
    for k in 0..60 {
        let kf = k as f64;
        if k > 0 {
            term0 *= q / (kf * kf);
            term1 *= q / (kf * (kf + 1.0));
            harmonic += 1.0 / kf;
        }
        i0 += term0;
        i1 += term1;
        s0 += harmonic * term0;
        // ψ(k+1) + ψ(k+2) = 2 H_k + 1/(k+1) - 2γ
        s1 += (2.0 * harmonic + 1.0 / (kf + 1.0) - 2.0 * EULER_GAMMA) * term1;
        if term0 < 1e-18 * i0 && k > 2 {
            break;
        }
    }
    let i1 = i1 * t / 2.0;
    let k0 = -(l + EULER_GAMMA) * i0 + s0;
    let k1 = 1.0 / t + l * i1 - t / 4.0 * s1;
    (k0, k1)
}

/// Steed's continued fraction (Temme's CF2) for `e^t K_0(t)`, `e^t K_1(t)`, `t >= 2`.
fn k01_scaled_cf2(t: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + t);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..100_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    h *= a1;
    let k0 = (PI / (2.0 * t)).sqrt() / s;
    let k1 = k0 * (t + 0.5 - h) / t;
    (k0, k1)
}

/// `e^{t} K_k(t)` for `k = 0..=nmax`, `t > 0`.
pub fn bessel_k_scaled_seq(nmax: usize, t: f64) -> Result<Vec<f64>> {
    check_arg(t, false, "bessel_k")?;
    let (k0, k1) = if t <= 2.0 {
        let (k0, k1) = k01_series(t);
        (k0 * t.exp(), k1 * t.exp())
    } else {
        k01_scaled_cf2(t)
    };
    let mut v = vec![0.0; nmax + 1];
    v[0] = k0;
    if nmax >= 1 {
        v[1] = k1;
    }
    for k in 1..nmax {
        v[k + 1] = v[k - 1] + 2.0 * k as f64 / t * v[k];
    }
    Ok(v)
}

/// `I_n(t)`; errors when the value leaves the floating-point range.
pub fn bessel_i(n: i32, t: f64) -> Result<f64> {
    let seq = bessel_i_scaled_seq(n.unsigned_abs() as usize, t)?;
    let v = seq[n.unsigned_abs() as usize] * t.exp();
    if !v.is_finite() {
        return Err(Error::Overflow {
            what: format!("I_{n}(t)"),
            threshold: EXP_OVERFLOW_THRESHOLD,
        });
    }
    Ok(v)
}

/// `K_n(t)`, `t > 0`.
pub fn bessel_k(n: i32, t: f64) -> Result<f64> {
    let seq = bessel_k_scaled_seq(n.unsigned_abs() as usize, t)?;
    Ok(seq[n.unsigned_abs() as usize] * (-t).exp())
}

/// `J_n(i t) = i^n I_n(t)`.
pub fn bessel_j_imag(n: i32, t: f64) -> Result<Complex64> {
    if t == 0.0 {
        return Ok(Complex64::new(if n == 0 { 1.0 } else { 0.0 }, 0.0));
    }
    // I_{-n} = I_n, and i^{-n} I_n = (-1)^n i^n I_n = J_{-n}(it).
    Ok(i_pow(n) * bessel_i(n, t)?)
}

/// `H_n^{(1)}(i t) = (2/π) i^{-(n+1)} K_n(t)`.
pub fn hankel1_imag(n: i32, t: f64) -> Result<Complex64> {
    if t == 0.0 {
        return Err(Error::Domain("hankel1_imag: singular at t = 0".into()));
    }
    // K_{-n} = K_n and i^{n-1} = (-1)^n i^{-(n+1)}, matching H_{-n} = (-1)^n H_n.
    Ok(2.0 / PI * i_pow(-(n + 1)) * bessel_k(n, t)?)
}

// ---------------------------------------------------------------------------
// Spherical functions
// ---------------------------------------------------------------------------

fn sph_j0(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        1.0 - z * z / 6.0 + z.powi(4) / 120.0
    } else {
        z.sin() / z
    }
}

fn sph_j1(z: f64) -> f64 {
    if z.abs() < 0.1 {
        let z2 = z * z;
        z / 3.0 * (1.0 - z2 / 10.0 * (1.0 - z2 / 28.0 * (1.0 - z2 / 54.0)))
    } else {
        z.sin() / (z * z) - z.cos() / z
    }
}

/// `j_k(z)` for `k = 0..=nmax`, `z >= 0`.
pub fn sph_bessel_j_seq(nmax: usize, z: f64) -> Result<Vec<f64>> {
    check_arg(z, true, "sph_bessel_j")?;
    let mut out = vec![0.0; nmax + 1];
    if z == 0.0 {
        out[0] = 1.0;
        return Ok(out);
    }
    if z > nmax as f64 + 1.0 && z > 1.0 {
        out[0] = sph_j0(z);
        if nmax >= 1 {
            out[1] = sph_j1(z);
        }
        for k in 1..nmax {
            out[k + 1] = (2 * k + 1) as f64 / z * out[k] - out[k - 1];
        }
        return Ok(out);
    }
    let m = miller_start(nmax, z);
    let mut v = vec![0.0; m + 2];
    v[m] = 1e-30;
    for k in (1..=m).rev() {
        v[k - 1] = (2 * k + 1) as f64 / z * v[k] - v[k + 1];
        if v[k - 1].abs() > RESCALE_LIMIT {
            for e in v.iter_mut() {
                *e /= RESCALE_LIMIT;
            }
        }
    }
    let j0 = sph_j0(z);
    let scale = if z < 1.0 || j0.abs() >= sph_j1(z).abs() {
        j0 / v[0]
    } else {
        sph_j1(z) / v[1]
    };
    for k in 0..=nmax {
        out[k] = v[k] * scale;
    }
    Ok(out)
}

/// `y_k(z)` for `k = 0..=nmax`, `z > 0`.
pub fn sph_bessel_y_seq(nmax: usize, z: f64) -> Result<Vec<f64>> {
    check_arg(z, false, "sph_bessel_y")?;
    let mut v = vec![0.0; nmax + 1];
    v[0] = -z.cos() / z;
    if nmax >= 1 {
        v[1] = -z.cos() / (z * z) - z.sin() / z;
    }
    for k in 1..nmax {
        v[k + 1] = (2 * k + 1) as f64 / z * v[k] - v[k - 1];
    }
    Ok(v)
}

/// `h_k^{(1)}(z)` for `k = 0..=nmax`, `z > 0`.
pub fn sph_hankel1_seq(nmax: usize, z: f64) -> Result<Vec<Complex64>> {
    if z == 0.0 {
        return Err(Error::Domain("sph_hankel1: singular at z = 0".into()));
    }
    let j = sph_bessel_j_seq(nmax, z)?;
    let y = sph_bessel_y_seq(nmax, z)?;
    Ok(j.into_iter().zip(y).map(|(a, b)| Complex64::new(a, b)).collect())
}

/// `e^{-t} i_k(t)` for `k = 0..=nmax`, `t >= 0`, with `i_k = sqrt(π/2t) I_{k+1/2}`.
pub fn sph_bessel_i_scaled_seq(nmax: usize, t: f64) -> Result<Vec<f64>> {
    check_arg(t, true, "sph_bessel_i")?;
    let mut out = vec![0.0; nmax + 1];
    if t == 0.0 {
        out[0] = 1.0;
        return Ok(out);
    }
    let m = miller_start(nmax, t) + (4.0 * t.sqrt()) as usize * 2;
    let mut v = vec![0.0; m + 2];
    v[m] = 1e-30;
    for k in (1..=m).rev() {
        v[k - 1] = (2 * k + 1) as f64 / t * v[k] + v[k + 1];
        if v[k - 1] > RESCALE_LIMIT {
            for e in v.iter_mut() {
                *e /= RESCALE_LIMIT;
            }
        }
    }
    // e^{-t} sinh(t)/t
    let i0 = if t < 1e-8 { 1.0 - t } else { -(-2.0 * t).exp_m1() / (2.0 * t) };
    let scale = i0 / v[0];
    for k in 0..=nmax {
        out[k] = v[k] * scale;
    }
    Ok(out)
}

/// `e^{t} k_k(t)` for `k = 0..=nmax`, `t > 0`, with `k_k = sqrt(π/2t) K_{k+1/2}`.
pub fn sph_bessel_k_scaled_seq(nmax: usize, t: f64) -> Result<Vec<f64>> {
    check_arg(t, false, "sph_bessel_k")?;
    let mut v = vec![0.0; nmax + 1];
    v[0] = PI / (2.0 * t);
    if nmax >= 1 {
        v[1] = PI / 2.0 * (1.0 / t + 1.0 / (t * t));
    }
    for k in 1..nmax {
        v[k + 1] = v[k - 1] + (2 * k + 1) as f64 / t * v[k];
    }
    Ok(v)
}

pub fn sph_bessel_j(n: u32, z: f64) -> Result<f64> {
    Ok(sph_bessel_j_seq(n as usize, z)?[n as usize])
}

pub fn sph_bessel_y(n: u32, z: f64) -> Result<f64> {
    Ok(sph_bessel_y_seq(n as usize, z)?[n as usize])
}

pub fn sph_hankel1(n: u32, z: f64) -> Result<Complex64> {
    Ok(sph_hankel1_seq(n as usize, z)?[n as usize])
}

/// `j_n(i t) = i^n i_n(t)`.
pub fn sph_bessel_j_imag(n: u32, t: f64) -> Result<Complex64> {
    let seq = sph_bessel_i_scaled_seq(n as usize, t)?;
    let v = seq[n as usize] * t.exp();
    if !v.is_finite() {
        return Err(Error::Overflow {
            what: format!("i_{n}(t)"),
            threshold: EXP_OVERFLOW_THRESHOLD,
        });
    }
    Ok(i_pow(n as i32) * v)
}

/// `h_n^{(1)}(i t) = -(2/π) i^{-n} k_n(t)`.
pub fn sph_hankel1_imag(n: u32, t: f64) -> Result<Complex64> {
    if t == 0.0 {
        return Err(Error::Domain("sph_hankel1_imag: singular at t = 0".into()));
    }
    let seq = sph_bessel_k_scaled_seq(n as usize, t)?;
    Ok(-2.0 / PI * i_pow(-(n as i32)) * (seq[n as usize] * (-t).exp()))
}

// ---------------------------------------------------------------------------
// Spherical harmonics
// ---------------------------------------------------------------------------

/// Orthonormalized associated Legendre values `N_n^m P_n^m(cos θ)` (with
/// Condon–Shortley phase) for `0 <= m <= n <= nmax`, stored at `n(n+1)/2 + m`.
pub fn legendre_normalized(nmax: usize, cos_theta: f64, sin_theta: f64) -> Vec<f64> {
    let idx = |n: usize, m: usize| n * (n + 1) / 2 + m;
    let mut q = vec![0.0; (nmax + 1) * (nmax + 2) / 2];
    q[0] = (0.25 / PI).sqrt();
    for m in 0..=nmax {
        if m > 0 {
            let mf = m as f64;
            q[idx(m, m)] = -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * sin_theta * q[idx(m - 1, m - 1)];
        }
        if m < nmax {
            q[idx(m + 1, m)] = (2.0 * m as f64 + 3.0).sqrt() * cos_theta * q[idx(m, m)];
        }
        for n in m + 2..=nmax {
            let (nf, mf) = (n as f64, m as f64);
            let a = ((4.0 * nf * nf - 1.0) / (nf * nf - mf * mf)).sqrt();
            let b = (((nf - 1.0).powi(2) - mf * mf) / (4.0 * (nf - 1.0).powi(2) - 1.0)).sqrt();
            q[idx(n, m)] = a * (cos_theta * q[idx(n - 1, m)] - b * q[idx(n - 2, m)]);
        }
    }
    q
}

/// All `Y_n^m(θ, φ)` with `n <= nmax`, laid out by [`ModeIndex3D::linear`].
#[derive(Debug, Clone)]
pub struct SphHarmonicTable {
    nmax: u32,
    values: Vec<Complex64>,
}

impl SphHarmonicTable {
    pub fn new(nmax: u32, theta: f64, phi: f64) -> Self {
        let n_us = nmax as usize;
        let q = legendre_normalized(n_us, theta.cos(), theta.sin());
        let mut values = vec![Complex64::new(0.0, 0.0); (n_us + 1) * (n_us + 1)];
        for n in 0..=n_us {
            for m in 0..=n {
                let y = q[n * (n + 1) / 2 + m] * Complex64::from_polar(1.0, m as f64 * phi);
                values[n * n + n + m] = y;
                if m > 0 {
                    values[n * n + n - m] = parity(m as i32) * y.conj();
                }
            }
        }
        Self { nmax, values }
    }

    /// Table for the direction of a (nonzero) 3-vector.
    pub fn for_direction(nmax: u32, x: &[f64]) -> Self {
        let (theta, phi) = crate::context::spherical_angles(x);
        Self::new(nmax, theta, phi)
    }

    pub fn nmax(&self) -> u32 {
        self.nmax
    }

    pub fn get(&self, n: u32, m: i32) -> Complex64 {
        self.values[ModeIndex3D { n, m }.linear()]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

/// Orthonormal spherical harmonic `Y_n^m(θ, φ)`.
pub fn sph_harmonic(n: u32, m: i32, theta: f64, phi: f64) -> Result<Complex64> {
    ModeIndex3D::new(n, m)?;
    if !(theta.is_finite() && phi.is_finite()) {
        return Err(Error::Domain("sph_harmonic: angles must be finite".into()));
    }
    let ma = m.unsigned_abs() as usize;
    let q = legendre_normalized(n as usize, theta.cos(), theta.sin());
    let y = q[n as usize * (n as usize + 1) / 2 + ma] * Complex64::from_polar(1.0, ma as f64 * phi);
    Ok(if m < 0 { parity(m) * y.conj() } else { y })
}

// ---------------------------------------------------------------------------
// Generic entry point with conditioning information
// ---------------------------------------------------------------------------

fn seq_condition(seq: &[f64], idx: usize) -> f64 {
    let scale = seq.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let v = seq[idx].abs();
    if v == 0.0 {
        f64::INFINITY
    } else {
        (scale / v).max(1.0)
    }
}

/// Evaluates one special function together with its condition estimate.
///
/// `order` is the (signed, for cylindrical kinds) order; spherical kinds
/// require `order >= 0`.
pub fn evaluate(kind: SpecialFunction, order: i32, arg: f64) -> Result<SpecialValue> {
    use SpecialFunction::*;
    let n = order.unsigned_abs() as usize;
    let sph_order = || -> Result<u32> {
        u32::try_from(order).map_err(|_| Error::Index(format!("spherical order must be >= 0, got {order}")))
    };
    let (value, condition_estimate) = match kind {
        BesselJ => {
            let s = bessel_j_seq(n + 1, arg)?;
            (Complex64::new(parity(order.min(0)) * s[n], 0.0), seq_condition(&s, n))
        }
        BesselY => {
            let s = bessel_y_seq(n + 1, arg)?;
            (Complex64::new(parity(order.min(0)) * s[n], 0.0), seq_condition(&s, n))
        }
        Hankel1 | Hankel2 => {
            let h = hankel1(order, arg)?;
            let h = if kind == Hankel2 { h.conj() } else { h };
            // |H_n| is monotone in n and never vanishes on the positive axis.
            (h, 1.0)
        }
        BesselJImag => (bessel_j_imag(order, arg)?, 1.0),
        Hankel1Imag => (hankel1_imag(order, arg)?, 1.0),
        SphBesselJ => {
            let s = sph_bessel_j_seq(sph_order()? as usize + 1, arg)?;
            (Complex64::new(s[n], 0.0), seq_condition(&s, n))
        }
        SphBesselY => {
            let s = sph_bessel_y_seq(sph_order()? as usize + 1, arg)?;
            (Complex64::new(s[n], 0.0), seq_condition(&s, n))
        }
        SphHankel1 => (sph_hankel1(sph_order()?, arg)?, 1.0),
        SphBesselJImag => (sph_bessel_j_imag(sph_order()?, arg)?, 1.0),
        SphHankel1Imag => (sph_hankel1_imag(sph_order()?, arg)?, 1.0),
    };
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::Overflow {
            what: format!("{kind:?} of order {order}"),
            threshold: arg,
        });
    }
    Ok(SpecialValue {
        value,
        condition_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Power series for J_n(z), independent of the recurrences.
    fn j_series(n: i32, z: f64) -> f64 {
        let n = n.unsigned_abs();
        let mut term = (z / 2.0).powi(n as i32) / (1..=n).map(|k| k as f64).product::<f64>();
        let mut sum = term;
        for k in 1..200 {
            term *= -(z * z / 4.0) / (k as f64 * (k + n) as f64);
            sum += term;
            if term.abs() < 1e-18 * sum.abs().max(1e-300) {
                break;
            }
        }
        sum
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn j_at_origin() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j(-3, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn j_matches_power_series() {
        for &z in &[0.01, 0.5, 1.0, 2.404825557695773, 5.0, 9.3] {
            for n in 0..12 {
                let v = bessel_j(n, z).unwrap();
                assert!(close(v, j_series(n, z), 1e-13), "J_{n}({z}) = {v} vs {}", j_series(n, z));
            }
        }
    }

    #[test]
    fn first_j0_zero() {
        let z = bessel_j0_zero(1);
        assert!((z - 2.404825557695773).abs() < 1e-14);
        assert!(bessel_j(0, z).unwrap().abs() < 1e-15);
        assert!((bessel_j0_zero(3) - 8.653727912911013).abs() < 1e-13);
    }

    #[test]
    fn reflection_negative_order() {
        for n in 0..20 {
            let a = bessel_j(-n, 3.7).unwrap();
            let b = bessel_j(n, 3.7).unwrap();
            assert_eq!(a, parity(n) * b);
        }
    }

    #[test]
    fn hankel_domain_error_at_zero() {
        assert!(matches!(hankel1(0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_j(0, f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(hankel1_imag(0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(sph_hankel1(1, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn large_argument_branch_matches_miller() {
        // Both branches are valid just above the switch; compare across it.
        for n in [0usize, 1, 5, 29, 31, 45] {
            let z = 30.5;
            let a = bessel_j_seq(n, z).unwrap()[n];
            let b = j_miller_full(n, z)[n];
            assert!((a - b).abs() < 1e-13, "n={n}: {a} vs {b}");
        }
    }

    #[test]
    fn modified_bessel_wronskian() {
        for &t in &[0.05, 0.7, 1.99, 2.01, 6.0, 40.0] {
            let i = bessel_i_scaled_seq(1, t).unwrap();
            let k = bessel_k_scaled_seq(1, t).unwrap();
            let w = (i[0] * k[1] + i[1] * k[0]) * t;
            assert!((w - 1.0).abs() < 1e-13, "t={t}: {w}");
        }
    }

    #[test]
    fn imaginary_argument_phases() {
        let t = 1.3;
        assert!(bessel_j_imag(0, t).unwrap().im == 0.0);
        let j2 = bessel_j_imag(2, t).unwrap();
        assert!((j2.re + bessel_i(2, t).unwrap()).abs() < 1e-15);
        let h0 = hankel1_imag(0, t).unwrap() * Complex64::new(0.0, PI / 2.0);
        assert!((h0.re - bessel_k(0, t).unwrap()).abs() < 1e-15 && h0.im.abs() < 1e-15);
        assert!(hankel1_imag(0, 10.0).unwrap().norm() < hankel1_imag(0, 1.0).unwrap().norm());
    }

    #[test]
    fn i_overflow_reports_threshold() {
        match bessel_i(0, 800.0) {
            Err(Error::Overflow { threshold, .. }) => assert!((threshold - 709.78).abs() < 0.01),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn spherical_closed_forms() {
        assert!(sph_bessel_j(0, PI).unwrap().abs() < 1e-15);
        assert_eq!(sph_bessel_j(0, 0.0).unwrap(), 1.0);
        let z = 2.0;
        let expected = -Complex64::new(0.0, z).exp() * Complex64::new(z, 1.0) / (z * z);
        assert!((sph_hankel1(1, z).unwrap() - expected).norm() < 1e-15);
        let h0 = sph_hankel1(0, z).unwrap();
        let e0 = Complex64::new(0.0, -1.0) * Complex64::new(0.0, z).exp() / z;
        assert!((h0 - e0).norm() < 1e-15);
    }

    #[test]
    fn spherical_imaginary_forms() {
        let t = 0.9;
        let j0 = sph_bessel_j_imag(0, t).unwrap();
        assert!((j0.re - t.sinh() / t).abs() < 1e-15);
        let h1 = sph_hankel1_imag(1, t).unwrap();
        let expected = Complex64::new(0.0, (-t).exp() * (t + 1.0) / (t * t));
        assert!((h1 - expected).norm() < 1e-15);
    }

    #[test]
    fn spherical_harmonic_values() {
        let y00 = sph_harmonic(0, 0, 0.3, 1.2).unwrap();
        assert!((y00.re - 0.282_094_791_773_878_14).abs() < 1e-15);
        let th = 0.77;
        let y10 = sph_harmonic(1, 0, th, 2.0).unwrap();
        assert!((y10.re - (3.0 / (4.0 * PI)).sqrt() * th.cos()).abs() < 1e-15);
        let y11 = sph_harmonic(1, 1, th, 0.4).unwrap();
        let e = -(3.0 / (8.0 * PI)).sqrt() * th.sin() * Complex64::from_polar(1.0, 0.4);
        assert!((y11 - e).norm() < 1e-15);
        assert!(matches!(sph_harmonic(2, 3, 0.1, 0.1), Err(Error::Index(_))));
    }

    #[test]
    fn table_matches_pointwise() {
        let t = SphHarmonicTable::new(6, 1.1, 4.0);
        for idx in ModeIndex3D::all(6) {
            let a = t.get(idx.n, idx.m);
            let b = sph_harmonic(idx.n, idx.m, 1.1, 4.0).unwrap();
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn evaluate_reports_condition() {
        let z0 = bessel_j0_zero(1);
        let near_zero = evaluate(SpecialFunction::BesselJ, 0, z0 + 1e-9).unwrap();
        let regular = evaluate(SpecialFunction::BesselJ, 0, 1.0).unwrap();
        assert!(near_zero.condition_estimate > 1e6);
        assert!(regular.condition_estimate < 2.0);
        assert!(evaluate(SpecialFunction::SphBesselJ, -1, 1.0).is_err());
    }
}
