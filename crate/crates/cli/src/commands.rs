use std::f64::consts::PI;

use biwave_core::fields::{boundary_trace_with_truncation, eval_field, natural_truncation};
use biwave_core::quadrature::boundary_grid;
use biwave_core::sources::project_modes;
use biwave_core::spectral::{
    direction_grid, modal_coefficients, u_hat_from_trace, v_check_from_trace, verdict, DEFAULT_TOLERANCE,
};
use biwave_core::{Dimension, NonradiatingVerdict, SourceField, VerdictConfig, WaveContext};
use serde::Serialize;

use crate::config::{config_hash, ScenarioConfig, NONRADIATING_KINDS};
use crate::error::{CliError, Result};
use crate::output::{emit, num, Csv, VERSION};

const DEFAULT_DIRECTIONS: usize = 64;
const PROBE_FACTORS: [f64; 3] = [1.05, 1.5, 3.0];
const PROBE_DIRECTIONS: usize = 16;

struct Scenario {
    config: ScenarioConfig,
    ctx: WaveContext,
    source: SourceField,
}

impl Scenario {
    fn build(config: ScenarioConfig) -> Result<Self> {
        let ctx = config.context()?;
        let source = config.source(&ctx)?;
        Ok(Self { config, ctx, source })
    }

    fn truncation(&self) -> usize {
        self.config
            .options
            .truncation
            .unwrap_or_else(|| natural_truncation(&self.ctx, &self.source))
    }

    fn resolution(&self) -> usize {
        self.config.options.resolution.unwrap_or(match self.ctx.dimension() {
            Dimension::Two => 256,
            Dimension::Three => 64,
        })
    }

    fn directions(&self) -> usize {
        self.config.options.directions.unwrap_or(DEFAULT_DIRECTIONS)
    }

    fn verdict_config(&self) -> VerdictConfig {
        VerdictConfig {
            truncation: self.config.options.truncation,
            tolerance: self.config.options.tolerance.unwrap_or(DEFAULT_TOLERANCE),
            direction_count: self.directions(),
            ..VerdictConfig::default()
        }
    }

    fn out(&self) -> Option<&str> {
        self.config.options.out.as_deref()
    }
}

#[derive(Serialize)]
struct VerdictReport<'a> {
    version: &'static str,
    config_sha256: String,
    dimension: usize,
    #[serde(rename = "R")]
    radius: f64,
    kappa: f64,
    kind: &'a str,
    residual_modal: f64,
    residual_spectral: f64,
    residual_field: f64,
    #[serde(rename = "N")]
    truncation: usize,
    tolerance: f64,
    norm_f: f64,
    is_nonradiating: bool,
}

impl<'a> VerdictReport<'a> {
    fn new(s: &'a Scenario, v: &NonradiatingVerdict, config_sha256: String) -> Self {
        Self {
            version: VERSION,
            config_sha256,
            dimension: s.ctx.dim(),
            radius: s.ctx.radius(),
            kappa: s.ctx.kappa(),
            kind: &s.config.kind,
            residual_modal: v.residual_modal,
            residual_spectral: v.residual_spectral,
            residual_field: v.residual_field,
            truncation: v.truncation,
            tolerance: v.tolerance,
            norm_f: v.norm_f,
            is_nonradiating: v.is_nonradiating,
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn run_verdict(config: ScenarioConfig) -> Result<()> {
    let s = Scenario::build(config)?;
    let v = verdict(&s.ctx, &s.source, &s.verdict_config())?;
    let report = VerdictReport::new(&s, &v, config_hash(&[&s.config]));
    emit(s.out(), &to_json(&report))
}

fn angle_columns(dim: Dimension, direction: &[f64]) -> Vec<f64> {
    let azimuth = direction[1].atan2(direction[0]).rem_euclid(2.0 * PI);
    match dim {
        Dimension::Two => vec![azimuth],
        Dimension::Three => vec![azimuth, direction[2].clamp(-1.0, 1.0).acos()],
    }
}

fn context_metadata(s: &Scenario) -> Vec<(&'static str, String)> {
    vec![
        ("dimension", s.ctx.dim().to_string()),
        ("R", num(s.ctx.radius())),
        ("kappa", num(s.ctx.kappa())),
        ("kind", s.config.kind.clone()),
    ]
}

pub fn run_trace(config: ScenarioConfig) -> Result<()> {
    let s = Scenario::build(config)?;
    let grid = boundary_grid(&s.ctx, s.resolution())?;
    let trace = boundary_trace_with_truncation(&s.ctx, &s.source, &grid, s.truncation())?;
    let mut header = match s.ctx.dimension() {
        Dimension::Two => vec!["theta"],
        Dimension::Three => vec!["theta", "phi"],
    };
    header.extend([
        "u_re", "u_im", "dnu_u_re", "dnu_u_im", "lap_u_re", "lap_u_im", "dnu_lap_u_re", "dnu_lap_u_im",
    ]);
    let mut meta = context_metadata(&s);
    meta.push(("N", s.truncation().to_string()));
    meta.push(("resolution", s.resolution().to_string()));
    let mut csv = Csv::new("trace", &config_hash(&[&s.config]), &meta, &header);
    for (i, &(theta, phi)) in grid.angles().iter().enumerate() {
        let angles = match s.ctx.dimension() {
            Dimension::Two => vec![theta],
            Dimension::Three => vec![theta, phi],
        };
        csv.row(
            &angles,
            &[trace.u[i], trace.du_dnu[i], trace.lap_u[i], trace.dlap_u_dnu[i]],
            &[],
        );
    }
    emit(s.out(), &csv.into_string())
}

pub fn run_spectral(config: ScenarioConfig) -> Result<()> {
    let s = Scenario::build(config)?;
    let dim = s.ctx.dimension();
    let directions = direction_grid(dim, s.directions())?;
    let coeffs = modal_coefficients(&s.ctx, &s.source, s.truncation())?;
    let f_hat = coeffs.fourier_on_circle(&directions)?;
    let f_check = coeffs.laplace_on_circle(&directions)?;
    let grid = boundary_grid(&s.ctx, s.resolution())?;
    let trace = boundary_trace_with_truncation(&s.ctx, &s.source, &grid, s.truncation())?;
    let u_hat = u_hat_from_trace(&s.ctx, &trace, &directions)?;
    let v_check = v_check_from_trace(&s.ctx, &trace, &directions)?;

    let mut header = match dim {
        Dimension::Two => vec!["dir_angle"],
        Dimension::Three => vec!["dir_angle", "dir_polar"],
    };
    header.extend([
        "fhat_re",
        "fhat_im",
        "fcheck_re",
        "fcheck_im",
        "uhat_re",
        "uhat_im",
        "vcheck_re",
        "vcheck_im",
        "fhat_minus_uhat_abs",
        "fcheck_minus_vcheck_abs",
    ]);
    let mut meta = context_metadata(&s);
    meta.push(("N", s.truncation().to_string()));
    meta.push(("resolution", s.resolution().to_string()));
    meta.push(("norm_f", num(coeffs.norm_f())));
    let mut csv = Csv::new("spectral", &config_hash(&[&s.config]), &meta, &header);
    for (i, d) in directions.iter().enumerate() {
        csv.row(
            &angle_columns(dim, d),
            &[f_hat[i], f_check[i], u_hat[i], v_check[i]],
            &[(f_hat[i] - u_hat[i]).norm(), (f_check[i] - v_check[i]).norm()],
        );
    }
    emit(s.out(), &csv.into_string())
}

#[derive(Serialize)]
struct NonuniquenessReport<'a> {
    version: &'static str,
    config_sha256: String,
    max_trace_discrepancy: f64,
    /// Discrepancy over the largest trace entry of `f`.
    relative_trace_discrepancy: f64,
    resolution: usize,
    #[serde(rename = "N")]
    truncation: usize,
    norm_f: f64,
    norm_g: f64,
    verdict_g: VerdictReport<'a>,
}

pub fn run_nonuniqueness(config_f: ScenarioConfig, config_g: ScenarioConfig) -> Result<()> {
    if !NONRADIATING_KINDS.contains(&config_g.kind.as_str()) {
        return Err(CliError::config(
            "kind",
            format!(
                "config-g must use a nonradiating construction ({}), got {:?}",
                NONRADIATING_KINDS.join(", "),
                config_g.kind
            ),
        ));
    }
    let f = Scenario::build(config_f)?;
    let g = Scenario::build(config_g)?;
    if f.ctx.dimension() != g.ctx.dimension() {
        return Err(CliError::config("dimension", "config and config-g must share the dimension"));
    }
    if f.ctx.radius() != g.ctx.radius() {
        return Err(CliError::config("R", "config and config-g must share R"));
    }
    if (f.ctx.kappa() - g.ctx.kappa()).abs() > 1e-14 * f.ctx.kappa() {
        return Err(CliError::config("kappa", "config and config-g must share kappa"));
    }
    let hash = config_hash(&[&f.config, &g.config]);
    let v = verdict(&g.ctx, &g.source, &g.verdict_config())?;

    let sum = f.source.sum(&g.source)?;
    let truncation = f.truncation().max(g.truncation());
    let grid = boundary_grid(&f.ctx, f.resolution())?;
    let trace_f = boundary_trace_with_truncation(&f.ctx, &f.source, &grid, truncation)?;
    let trace_sum = boundary_trace_with_truncation(&f.ctx, &sum, &grid, truncation)?;
    let discrepancy = trace_f.max_discrepancy(&trace_sum)?;
    let reference = trace_f.max_abs();
    let report = NonuniquenessReport {
        version: VERSION,
        config_sha256: hash.clone(),
        max_trace_discrepancy: discrepancy,
        relative_trace_discrepancy: if reference > 0.0 { discrepancy / reference } else { discrepancy },
        resolution: f.resolution(),
        truncation,
        norm_f: f.source.l2_norm()?,
        norm_g: v.norm_f,
        verdict_g: VerdictReport::new(&g, &v, hash),
    };
    emit(f.out(), &to_json(&report))?;
    if !v.is_nonradiating {
        return Err(CliError::RadiatingPerturbation {
            modal: v.residual_modal,
            spectral: v.residual_spectral,
            field: v.residual_field,
        });
    }
    Ok(())
}

pub fn run_field(config: ScenarioConfig) -> Result<()> {
    let s = Scenario::build(config)?;
    let dim = s.ctx.dim();
    let points = match &s.config.options.points {
        Some(p) => {
            if let Some(bad) = p.iter().position(|x| x.len() != dim) {
                return Err(CliError::config("points", format!("point {bad} does not have {dim} coordinates")));
            }
            p.clone()
        }
        None => {
            let mut out = Vec::new();
            for factor in PROBE_FACTORS {
                for d in direction_grid(s.ctx.dimension(), PROBE_DIRECTIONS)? {
                    out.push(d.iter().map(|c| c * factor * s.ctx.radius()).collect());
                }
            }
            out
        }
    };
    // modal sources evaluate anywhere, including inside the support
    let modal = project_modes(&s.source, s.truncation())?;
    let axes = ["x1", "x2", "x3"];
    let mut header: Vec<&str> = axes[..dim].to_vec();
    header.extend(["u_re", "u_im", "f_h_re", "f_h_im", "f_m_re", "f_m_im"]);
    let mut meta = context_metadata(&s);
    meta.push(("N", s.truncation().to_string()));
    let mut csv = Csv::new("field", &config_hash(&[&s.config]), &meta, &header);
    for x in &points {
        let sample = eval_field(&s.ctx, &modal, x)?;
        csv.row(x, &[sample.u, sample.f_h, sample.f_m], &[]);
    }
    emit(s.out(), &csv.into_string())
}
