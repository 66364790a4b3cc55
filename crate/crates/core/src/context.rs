use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spatial dimension of the problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dimension {
    Two,
    Three,
}

impl Dimension {
    pub fn from_int(d: u32) -> Result<Self> {
        match d {
            2 => Ok(Dimension::Two),
            3 => Ok(Dimension::Three),
            _ => Err(Error::param("dimension", format!("must be 2 or 3, got {d}"))),
        }
    }

    pub fn as_usize(self) -> usize {
        match self {
            Dimension::Two => 2,
            Dimension::Three => 3,
        }
    }
}

/// Dimension, wavenumber and support-ball radius shared by every operation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveContext {
    dimension: Dimension,
    kappa: f64,
    radius: f64,
}

impl WaveContext {
    pub fn new(dimension: Dimension, kappa: f64, radius: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::param("kappa", format!("must be positive and finite, got {kappa}")));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::param("R", format!("must be positive and finite, got {radius}")));
        }
        Ok(Self { dimension, kappa, radius })
    }

    /// Context whose `kappa * R` is the `root_index`-th positive zero of J_0 (2D)
    /// or j_0 (3D), i.e. the coupling required by the Bessel-type constructions.
    pub fn from_root(dimension: Dimension, radius: f64, root_index: u32) -> Result<Self> {
        if root_index == 0 {
            return Err(Error::param("root_index", "must be at least 1"));
        }
        let root = match dimension {
            Dimension::Two => crate::specfun::bessel_j0_zero(root_index),
            Dimension::Three => std::f64::consts::PI * root_index as f64,
        };
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::param("R", format!("must be positive and finite, got {radius}")));
        }
        Self::new(dimension, root / radius, radius)
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn dim(&self) -> usize {
        self.dimension.as_usize()
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Same wavenumber and dimension, different ball radius.
    pub fn with_radius(&self, radius: f64) -> Result<Self> {
        Self::new(self.dimension, self.kappa, radius)
    }

    pub(crate) fn check_point(&self, x: &[f64], name: &str) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::param(
                name,
                format!("expected a {}-vector, got length {}", self.dim(), x.len()),
            ));
        }
        if x.iter().any(|c| !c.is_finite()) {
            return Err(Error::param(name, "coordinates must be finite"));
        }
        Ok(())
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

pub(crate) fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Polar angle in [0, 2π) of the first two coordinates.
pub(crate) fn azimuth(x: &[f64]) -> f64 {
    let a = x[1].atan2(x[0]);
    if a < 0.0 {
        a + 2.0 * std::f64::consts::PI
    } else {
        a
    }
}

/// (theta, phi) spherical angles of a 3-vector; theta in [0, π], phi in [0, 2π).
pub(crate) fn spherical_angles(x: &[f64]) -> (f64, f64) {
    let r = norm(x);
    if r == 0.0 {
        return (0.0, 0.0);
    }
    let theta = (x[2] / r).clamp(-1.0, 1.0).acos();
    (theta, azimuth(x))
}
