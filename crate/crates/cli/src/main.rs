mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{Overrides, ScenarioConfig};
use crate::error::Result;

/// Nonradiating sources of the biharmonic wave equation.
#[derive(Debug, Parser)]
#[command(name = "biwave", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether the configured source is nonradiating (JSON).
    Verdict(Common),
    /// Boundary trace u, ∂ν u, Δu, ∂ν Δu on the sphere of radius R (CSV).
    Trace(Common),
    /// f̂, f̌ on |ξ| = κ next to the transforms recovered from the trace (CSV).
    Spectral(Common),
    /// Compare the traces of f and f + g for a nonradiating g (JSON).
    Nonuniqueness {
        #[command(flatten)]
        common: Common,
        /// Scenario file for the perturbation g.
        #[arg(long = "config-g", value_name = "PATH")]
        config_g: PathBuf,
    },
    /// u, f_H, f_M at configured or default probe points (CSV).
    Field(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file (JSON).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<String>,
    #[arg(long, value_name = "N")]
    truncation: Option<usize>,
    #[arg(long, value_name = "T")]
    tolerance: Option<f64>,
    #[arg(long, value_name = "M")]
    resolution: Option<usize>,
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..=3))]
    dimension: Option<u32>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            dimension: self.dimension,
            truncation: self.truncation,
            tolerance: self.tolerance,
            resolution: self.resolution,
            out: self.out.clone(),
        }
    }

    fn load(&self) -> Result<ScenarioConfig> {
        ScenarioConfig::load(&self.config, &self.overrides())
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Verdict(c) => commands::run_verdict(c.load()?),
        Command::Trace(c) => commands::run_trace(c.load()?),
        Command::Spectral(c) => commands::run_spectral(c.load()?),
        Command::Field(c) => commands::run_field(c.load()?),
        Command::Nonuniqueness { common, config_g } => {
            let f = common.load()?;
            // g shares dimension and numerics with f; its own output path is ignored
            let mut o = common.overrides();
            o.out = None;
            let g = ScenarioConfig::load(&config_g, &o)?;
            commands::run_nonuniqueness(f, g)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
