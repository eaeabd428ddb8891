//! `fde-sic`: command-line front end for the canceller models, channel
//! synthesis, configuration optimization, sweeps, network-gain analysis, and
//! the digital cancellation stage.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 config/schema error,
//! 3 numeric degeneracy.

mod commands;
mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use fde_sic_core::Error;
use serde::de::DeserializeOwned;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "fde-sic",
    about = "Frequency-domain-equalization self-interference canceller toolkit",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the config's global seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory (default: current directory).
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate canceller/filter responses and emit them as CSV curves.
    Model(CommonArgs),
    /// Optimize a canceller configuration against an SI channel.
    Optimize {
        #[command(flatten)]
        common: CommonArgs,
        /// Override the config's canceller family.
        #[arg(long)]
        family: Option<String>,
        /// Add a baseline row (`heur` for the RFIC heuristic).
        #[arg(long)]
        baseline: Option<String>,
    },
    /// Run a family x taps x bandwidth x mode SIC sweep.
    Sweep(CommonArgs),
    /// Closed-form network throughput and fairness analysis.
    Network(CommonArgs),
    /// RF + digital self-interference cancellation pipeline.
    Digsic(CommonArgs),
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Io { .. } => 1,
        Error::Parse { .. } | Error::InvalidArgument(_) | Error::GridMismatch { .. } => 2,
        Error::NumericDegeneracy { .. } | Error::BandTooNarrow { .. } => 3,
    }
}

/// Load and schema-check a JSON config. Unknown keys are rejected by the
/// deserializers, so any mismatch lands here as a schema error (exit 2).
fn load_config<T: DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| {
        Error::invalid(format!("config schema error in {}: {e}", path.display()))
    })
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.cmd {
        Cmd::Model(c) => {
            let cfg: config::ModelConfig = load_config(&c.config)?;
            commands::cmd_model(&cfg, &c.out)
        }
        Cmd::Optimize {
            common: c,
            family,
            baseline,
        } => {
            let cfg: config::OptimizeConfig = load_config(&c.config)?;
            commands::cmd_optimize(
                &cfg,
                config_base(&c.config),
                &c.out,
                c.seed,
                family.as_deref(),
                baseline.as_deref(),
            )
        }
        Cmd::Sweep(c) => {
            let cfg: config::SweepConfig = load_config(&c.config)?;
            commands::cmd_sweep(&cfg, config_base(&c.config), &c.out, c.seed, c.jobs)
        }
        Cmd::Network(c) => {
            let cfg: config::NetworkConfig = load_config(&c.config)?;
            commands::cmd_network(&cfg, &c.out)
        }
        Cmd::Digsic(c) => {
            let cfg: config::DigsicConfig = load_config(&c.config)?;
            commands::cmd_digsic(&cfg, config_base(&c.config), &c.out, c.seed)
        }
    }
}

/// Relative file references inside a config resolve against the config's
/// own directory.
fn config_base(config_path: &Path) -> &Path {
    config_path.parent().unwrap_or(Path::new("."))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
