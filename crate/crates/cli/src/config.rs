//! Scenario files.
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "R": 1.0,
//!   "root_index": 1,
//!   "kind": "gaussian",
//!   "parameters": { "center": [0.2, -0.1], "width": 0.2 },
//!   "options": { "resolution": 256, "directions": 64 }
//! }
//! ```
//!
//! Exactly one of `kappa` and `root_index` must be given. Unknown keys are
//! rejected at every level.

use std::path::Path;

use biwave_core::sources::{make_2d_bessel_nonradiating, make_3d_bessel_nonradiating, make_bump_nonradiating};
use biwave_core::{BumpShape, Dimension, SourceField, WaveContext};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<u32>,
    #[serde(rename = "R")]
    pub radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_index: Option<u32>,
    pub kind: String,
    #[serde(default = "empty_object")]
    pub parameters: Value,
    /// Overall factor applied to the source.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default)]
    pub options: Options,
}

fn empty_object() -> Value {
    Value::Object(Default::default())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Boundary grid resolution: nodes on the circle, or azimuths on the
    /// sphere (with half as many polar nodes).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    /// Number of directions on `|ξ| = κ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<usize>,
    /// Evaluation points for the `field` command.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    /// Not part of the hashed configuration.
    #[serde(default, skip_serializing)]
    pub out: Option<String>,
}

/// Values given on the command line; they take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub dimension: Option<u32>,
    pub truncation: Option<usize>,
    pub tolerance: Option<f64>,
    pub resolution: Option<usize>,
    pub out: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaussianParams {
    #[serde(default)]
    center: Option<Vec<f64>>,
    width: f64,
    #[serde(default = "one")]
    amplitude: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BumpParams {
    #[serde(default)]
    radius: Option<f64>,
    #[serde(default = "one")]
    amplitude: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Bessel3dParams {
    #[serde(default = "three")]
    m1: u32,
    #[serde(default = "four")]
    m2: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModeParams {
    n: i32,
    #[serde(default)]
    m: Option<i32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantParams {
    value: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoParams {}

fn one() -> f64 {
    1.0
}

fn three() -> u32 {
    3
}

fn four() -> u32 {
    4
}

/// Source kinds accepted in `kind`.
pub const KINDS: [&str; 7] = ["gaussian", "bump", "bessel_2d", "bessel_3d", "bessel_mode", "constant", "zero"];

/// Kinds that build nonradiating sources.
pub const NONRADIATING_KINDS: [&str; 3] = ["bump", "bessel_2d", "bessel_3d"];

impl ScenarioConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut config: Self = serde_json::from_str(&text).map_err(|e| CliError::config(&key_of(&e), e.to_string()))?;
        config.apply(overrides);
        config.validate()?;
        Ok(config)
    }

    fn apply(&mut self, o: &Overrides) {
        if o.dimension.is_some() {
            self.dimension = o.dimension;
        }
        let opts = &mut self.options;
        opts.truncation = o.truncation.or(opts.truncation);
        opts.tolerance = o.tolerance.or(opts.tolerance);
        opts.resolution = o.resolution.or(opts.resolution);
        if o.out.is_some() {
            opts.out = o.out.clone();
        }
    }

    fn validate(&self) -> Result<()> {
        match self.dimension {
            None => return Err(CliError::config("dimension", "missing; set it in the file or pass --dimension")),
            Some(2 | 3) => {}
            Some(d) => return Err(CliError::config("dimension", format!("must be 2 or 3, got {d}"))),
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(CliError::config("R", format!("must be positive, got {}", self.radius)));
        }
        match (self.kappa, self.root_index) {
            (Some(_), Some(_)) => return Err(CliError::config("kappa", "give either kappa or root_index, not both")),
            (None, None) => return Err(CliError::config("kappa", "one of kappa or root_index is required")),
            (Some(k), None) if !(k.is_finite() && k > 0.0) => {
                return Err(CliError::config("kappa", format!("must be positive, got {k}")))
            }
            (None, Some(0)) => return Err(CliError::config("root_index", "must be at least 1")),
            _ => {}
        }
        if !KINDS.contains(&self.kind.as_str()) {
            return Err(CliError::config(
                "kind",
                format!("unknown source kind {:?}; expected one of {}", self.kind, KINDS.join(", ")),
            ));
        }
        if !self.parameters.is_object() {
            return Err(CliError::config("parameters", "must be a JSON object"));
        }
        if let Some(s) = self.scale {
            if !s.is_finite() {
                return Err(CliError::config("scale", "must be finite"));
            }
        }
        let o = &self.options;
        if let Some(t) = o.tolerance {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::config("tolerance", format!("must be positive, got {t}")));
            }
        }
        if let Some(r) = o.resolution {
            if r < 8 {
                return Err(CliError::config("resolution", format!("must be at least 8, got {r}")));
            }
        }
        if o.directions == Some(0) {
            return Err(CliError::config("directions", "must be positive"));
        }
        Ok(())
    }

    pub fn dimension(&self) -> Dimension {
        match self.dimension {
            Some(3) => Dimension::Three,
            _ => Dimension::Two,
        }
    }

    pub fn context(&self) -> Result<WaveContext> {
        let dim = self.dimension();
        let ctx = match (self.kappa, self.root_index) {
            (Some(k), _) => WaveContext::new(dim, k, self.radius)?,
            (None, Some(i)) => WaveContext::from_root(dim, self.radius, i)?,
            (None, None) => return Err(CliError::config("kappa", "one of kappa or root_index is required")),
        };
        Ok(ctx)
    }

    fn params<T: DeserializeOwned>(&self) -> Result<T> {
        serde_json::from_value(self.parameters.clone())
            .map_err(|e| CliError::config(&format!("parameters.{}", key_of(&e)), e.to_string()))
    }

    pub fn source(&self, ctx: &WaveContext) -> Result<SourceField> {
        let src = match self.kind.as_str() {
            "gaussian" => {
                let p: GaussianParams = self.params()?;
                let center = p.center.unwrap_or_else(|| vec![0.0; ctx.dim()]);
                SourceField::gaussian(ctx, &center, p.width, p.amplitude)?
            }
            "bump" => {
                let p: BumpParams = self.params()?;
                let shape = BumpShape::Mollifier {
                    radius: p.radius.unwrap_or(0.8 * ctx.radius()),
                    amplitude: p.amplitude,
                };
                make_bump_nonradiating(ctx, &shape)?
            }
            "bessel_2d" => {
                let _: NoParams = self.params()?;
                make_2d_bessel_nonradiating(ctx)?
            }
            "bessel_3d" => {
                let p: Bessel3dParams = self.params()?;
                make_3d_bessel_nonradiating(ctx, p.m1, p.m2)?
            }
            "bessel_mode" => {
                let p: ModeParams = self.params()?;
                match (ctx.dimension(), p.m) {
                    (Dimension::Two, None) => SourceField::bessel_mode_2d(ctx, p.n)?,
                    (Dimension::Two, Some(_)) => {
                        return Err(CliError::config("parameters.m", "only meaningful in 3D"));
                    }
                    (Dimension::Three, m) => {
                        let n = u32::try_from(p.n).map_err(|_| CliError::config("parameters.n", "must be non-negative in 3D"))?;
                        SourceField::bessel_mode_3d(ctx, n, m.unwrap_or(0))?
                    }
                }
            }
            "constant" => {
                let p: ConstantParams = self.params()?;
                SourceField::constant(ctx, p.value)
            }
            "zero" => {
                let _: NoParams = self.params()?;
                SourceField::zero(ctx)
            }
            other => return Err(CliError::config("kind", format!("unknown source kind {other:?}"))),
        };
        Ok(match self.scale {
            Some(s) => src.scaled(Complex64::new(s, 0.0)),
            None => src,
        })
    }

    /// Canonical JSON: keys sorted, overrides applied.
    pub fn canonical(&self) -> String {
        serde_json::to_value(self).map(|v| v.to_string()).unwrap_or_default()
    }
}

/// SHA-256 over the canonical forms of one or more configs.
pub fn config_hash(configs: &[&ScenarioConfig]) -> String {
    let mut h = Sha256::new();
    for c in configs {
        h.update(c.canonical().as_bytes());
        h.update([0u8]);
    }
    hex::encode(h.finalize())
}

/// Best guess at the key a serde error refers to.
fn key_of(e: &serde_json::Error) -> String {
    let msg = e.to_string();
    for marker in ["unknown field `", "missing field `", "duplicate field `"] {
        if let Some(rest) = msg.split(marker).nth(1) {
            if let Some(key) = rest.split('`').next() {
                return key.to_string();
            }
        }
    }
    "config".to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ScenarioConfig> {
        let mut c: ScenarioConfig =
            serde_json::from_str(text).map_err(|e| CliError::config(&key_of(&e), e.to_string()))?;
        c.apply(&Overrides::default());
        c.validate()?;
        Ok(c)
    }

    #[test]
    fn minimal_config() {
        let c = parse(r#"{"dimension": 2, "R": 1.0, "root_index": 1, "kind": "bessel_2d"}"#).unwrap();
        let ctx = c.context().unwrap();
        assert!((ctx.kappa() - 2.404_825_557_695_773).abs() < 1e-12);
        assert!(c.source(&ctx).unwrap().l2_norm().unwrap() > 0.0);
    }

    #[test]
    fn errors_name_the_key() {
        let cases = [
            (r#"{"dimension": 2, "R": -1.0, "kappa": 1.0, "kind": "zero"}"#, "R"),
            (r#"{"dimension": 2, "R": 1.0, "kind": "zero"}"#, "kappa"),
            (r#"{"dimension": 4, "R": 1.0, "kappa": 1.0, "kind": "zero"}"#, "dimension"),
            (r#"{"dimension": 2, "R": 1.0, "kappa": 1.0, "kind": "zero", "colour": 1}"#, "colour"),
            (r#"{"dimension": 2, "R": 1.0, "kappa": 1.0, "kind": "plasma"}"#, "kind"),
            (r#"{"dimension": 2, "R": 1.0, "kappa": 1.0, "kind": "zero", "options": {"tolerance": -1}}"#, "tolerance"),
        ];
        for (text, key) in cases {
            match parse(text) {
                Err(CliError::Config { key: k, .. }) => assert_eq!(k, key, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn parameter_errors_are_prefixed() {
        let c = parse(r#"{"dimension": 2, "R": 1.0, "kappa": 1.0, "kind": "gaussian", "parameters": {"widht": 0.2}}"#)
            .unwrap();
        let ctx = c.context().unwrap();
        match c.source(&ctx) {
            Err(CliError::Config { key, .. }) => assert_eq!(key, "parameters.widht"),
            Err(e) => panic!("{e}"),
            Ok(_) => panic!("accepted a misspelt parameter"),
        }
    }

    #[test]
    fn canonical_form_ignores_key_order() {
        let a = parse(r#"{"dimension": 2, "R": 1.0, "kappa": 1.0, "kind": "zero"}"#).unwrap();
        let b = parse(r#"{"kind": "zero", "kappa": 1.0, "R": 1.0, "dimension": 2}"#).unwrap();
        assert_eq!(config_hash(&[&a]), config_hash(&[&b]));
        let c = parse(r#"{"kind": "zero", "kappa": 1.5, "R": 1.0, "dimension": 2}"#).unwrap();
        assert_ne!(config_hash(&[&a]), config_hash(&[&c]));
    }
}
