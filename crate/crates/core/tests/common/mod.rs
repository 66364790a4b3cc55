//! Independent reference implementations used as test oracles. None of these
//! share code with the library.

#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::PI;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Power series for `J_n(z)`.
pub fn j_series(n: i32, z: f64) -> f64 {
    let a = n.unsigned_abs();
    let mut term = (z / 2.0).powi(a as i32) / (1..=a).map(|k| k as f64).product::<f64>();
    let mut sum = term;
    for k in 1..300 {
        term *= -(z * z / 4.0) / (k as f64 * (k + a) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) && k > 3 {
            break;
        }
    }
    if n < 0 && a % 2 == 1 {
        -sum
    } else {
        sum
    }
}

/// Power series for `I_n(t)` (all terms positive).
pub fn i_series(n: u32, t: f64) -> f64 {
    let mut term = (t / 2.0).powi(n as i32) / (1..=n).map(|k| k as f64).product::<f64>();
    let mut sum = term;
    for k in 1..400 {
        term *= (t * t / 4.0) / (k as f64 * (k + n) as f64);
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    sum
}

/// `Γ(m + 1/2)` for integer `m >= 0`.
fn gamma_half(m: u32) -> f64 {
    let mut g = PI.sqrt();
    for k in 0..m {
        g *= k as f64 + 0.5;
    }
    g
}

/// Power series for `J_{n+1/2}(z)`.
pub fn j_half_series(n: u32, z: f64) -> f64 {
    let nu = n as f64 + 0.5;
    let mut term = (z / 2.0).powf(nu) / gamma_half(n + 1);
    let mut sum = term;
    for k in 1..300 {
        term *= -(z * z / 4.0) / (k as f64 * (k as f64 + nu));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) && k > 3 {
            break;
        }
    }
    sum
}

/// Neumann series for `Y_0(z)`.
pub fn y0_series(z: f64) -> f64 {
    let q = z * z / 4.0;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut s = 0.0;
    for k in 1..300 {
        let kf = k as f64;
        term *= q / (kf * kf);
        harmonic += 1.0 / kf;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        s += sign * harmonic * term;
        if term < 1e-18 {
            break;
        }
    }
    2.0 / PI * (((z / 2.0).ln() + EULER_GAMMA) * j_series(0, z) + s)
}

/// Adaptive Simpson quadrature.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `K_0(t) = ∫_0^∞ e^{−t cosh s} ds`.
pub fn k0_integral(t: f64) -> f64 {
    // integrand below e^{−60} beyond s_max
    let s_max = (60.0 / t).acosh();
    adaptive_simpson(&|s: f64| (-t * s.cosh()).exp(), 0.0, s_max, 1e-16 * (-t).exp())
}

/// Fourth-order central-difference Laplacian of a complex field.
pub fn laplacian_fd(f: &dyn Fn(&[f64]) -> Complex64, x: &[f64], h: f64) -> Complex64 {
    let centre = f(x);
    let mut acc = Complex64::new(0.0, 0.0);
    for axis in 0..x.len() {
        let shifted = |s: f64| {
            let mut p = x.to_vec();
            p[axis] += s * h;
            f(&p)
        };
        acc += -shifted(2.0) + 16.0 * shifted(1.0) - 30.0 * centre + 16.0 * shifted(-1.0) - shifted(-2.0);
    }
    acc / (12.0 * h * h)
}

/// `Δ²` by nesting the fourth-order Laplacian.
pub fn bilaplacian_fd(f: &dyn Fn(&[f64]) -> Complex64, x: &[f64], h: f64) -> Complex64 {
    let inner = |y: &[f64]| laplacian_fd(f, y, h);
    laplacian_fd(&inner, x, h)
}

/// Fourth-order central first derivative of a scalar function.
pub fn derivative_fd(f: &dyn Fn(f64) -> Complex64, x: f64, h: f64) -> Complex64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

/// Uniform random point in the ball of radius `r` (rejection sampling).
pub fn random_in_ball<R: rand::Rng>(rng: &mut R, dim: usize, r: f64) -> Vec<f64> {
    loop {
        let p: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n2: f64 = p.iter().map(|c| c * c).sum();
        if n2 < 1.0 {
            return p.into_iter().map(|c| c * r).collect();
        }
    }
}

/// Uniform random unit vector.
pub fn random_direction<R: rand::Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let p = random_in_ball(rng, dim, 1.0);
        let n: f64 = p.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 0.1 {
            return p.into_iter().map(|c| c / n).collect();
        }
    }
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Power series for the modified spherical Bessel function `i_n(t)`.
pub fn sph_i_series(n: u32, t: f64) -> f64 {
    let double_factorial: f64 = (0..=n).map(|k| (2 * k + 1) as f64).product();
    let mut term = t.powi(n as i32) / double_factorial;
    let mut sum = term;
    for k in 1..400 {
        term *= (t * t / 2.0) / (k as f64 * (2 * n + 2 * k + 1) as f64);
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    sum
}
