//! Command-line front end: parses a run configuration, runs one experiment
//! and writes a CSV table plus a JSON summary, both carrying the full
//! configuration so the run can be repeated byte for byte.

pub mod commands;
pub mod config;
pub mod emit;

use clap::{Parser, Subcommand};
use config::SchemeName;
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("{0}")]
    Run(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Capacity(_) => 3,
            CliError::Run(_) | CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "qroutesim", version, about = "Simulate qutrit-assisted quantum routers and routing networks")]
pub struct Cli {
    /// TOML run configuration (or a JSON config echoed by an earlier run).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides QROUTESIM_OUT and `[output] dir`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Turn every noise source off.
    #[arg(long, global = true)]
    pub noiseless: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Routed populations against the address amplitude θ.
    ThetaScan {
        #[arg(long)]
        scheme: Option<SchemeName>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Odd/even parity interference against the address phase φ.
    PhiScan {
        #[arg(long)]
        scheme: Option<SchemeName>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Tomography of the routed (C, L, R) state.
    Qst {
        #[arg(long)]
        scheme: Option<SchemeName>,
        #[arg(long)]
        shots: Option<u64>,
    },
    /// Random access test on one router.
    Rat(RatArgs),
    /// Random access test on the two-layer network.
    Rat2(RatArgs),
    /// Repeated √CZ populations and calibration cost.
    Floquet {
        /// Calibrate ϑ by Nelder–Mead starting here (radians).
        #[arg(long)]
        calibrate_from: Option<f64>,
    },
    /// Compile a full query on a routing tree; writes the circuit text.
    Compile {
        #[arg(long)]
        layers: Option<usize>,
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        scheme: Option<String>,
    },
    /// Print (single-qutrit gates, two-qutrit gates, depth).
    Counts {
        /// clifford | tcg-non-eraser | tcg-eraser | sp-tcg
        #[arg(long, default_value = "tcg-eraser")]
        scheme: String,
        /// Count a whole compiled query instead of one router.
        #[arg(long)]
        layers: Option<usize>,
        #[arg(long, default_value = "full")]
        mode: String,
    },
    /// Place a router tree on a square-lattice processor.
    Layout {
        /// ROWSxCOLS
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        layers: Option<usize>,
        /// Defect mask file: `.` working, `x` dead, one line per row.
        #[arg(long)]
        mask: Option<PathBuf>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Closed-form decay curves and their balance point.
    NoiseCurves {
        #[arg(long)]
        t_max_us: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
    },
}

#[derive(Debug, clap::Args)]
pub struct RatArgs {
    #[arg(long)]
    pub scheme: Option<SchemeName>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub shots: Option<u64>,
}

/// Runs a parsed command line; `Ok` carries the text for stdout.
pub fn run(cli: Cli) -> Result<String, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => config::RunConfig::load(p)?,
        None => config::RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cli.noiseless {
        cfg.noise.enabled = false;
    }
    commands::dispatch(cli.command, cfg, cli.out.as_deref())
}
