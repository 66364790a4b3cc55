//! Forward solver and nonradiating-source diagnostics for the biharmonic
//! wave equation `Δ²u − κ⁴u = −f` in two and three dimensions.
//!
//! The Green's function splits as `G = −(Φ_H − Φ_M) / 2κ²` into Helmholtz and
//! modified Helmholtz parts, so a source radiates nothing outside its support
//! ball exactly when both parts vanish there. [`spectral::verdict`] checks this
//! three independent ways: modal coefficients, the restricted transforms
//! `f̂`, `f̌` on `|ξ| = κ`, and the exterior field itself.

pub mod context;
pub mod error;
pub mod fields;
pub mod kernels;
pub mod quadrature;
pub mod sources;
pub mod specfun;
pub mod spectral;

pub use context::{Dimension, WaveContext};
pub use error::{Error, Result};
pub use fields::{BoundaryTrace, FarFieldSample, FieldSample};
pub use sources::{BumpShape, NonradiatingRecipe, SourceField};
pub use spectral::{ModalCoefficients, NonradiatingVerdict, SpectralSample, VerdictConfig};
