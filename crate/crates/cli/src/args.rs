use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

const FAMILIES: [&str; 3] = ["exponential", "sup-gamma", "sup-gig"];

#[derive(Debug, Parser)]
#[command(
    name = "fleeting",
    version,
    about = "Simulate, analyse and fit integer-valued price processes with fleeting moves",
    args_override_self = true
)]
pub struct Cli {
    /// JSON file of flag values (or a run manifest) applied before the command line.
    #[arg(long, global = true, value_name = "JSON")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// Simulate one path from a parameter file.
    Simulate(SimulateArgs),
    /// Clean raw quote/trade records into a jump series.
    Clean(CleanArgs),
    /// Fit b and the trawl shape to a path's variance signature.
    Fit(FitArgs),
    /// Probability mass function of a return over horizon t.
    Pmf(PmfArgs),
    /// Sample and model autocorrelations of returns.
    Acf(AcfArgs),
    /// Variance signature sigma^2_delta / delta, optionally with a model curve.
    Signature(SignatureArgs),
    /// Model-based bootstrap standard errors.
    Bootstrap(BootstrapArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Clean(_) => "clean",
            Command::Fit(_) => "fit",
            Command::Pmf(_) => "pmf",
            Command::Acf(_) => "acf",
            Command::Signature(_) => "signature",
            Command::Bootstrap(_) => "bootstrap",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GridArgs {
    #[arg(long, default_value_t = 0.1)]
    pub grid_min: f64,
    #[arg(long, default_value_t = 60.0)]
    pub grid_max: f64,
    #[arg(long, default_value_t = 60)]
    pub grid_points: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub t0: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub t1: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub v0: i64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Stream index within the seed; path `i` of a bootstrap uses index `i`.
    #[arg(long, default_value_t = 0)]
    pub path_index: u64,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CleanArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Currency units per tick.
    #[arg(long)]
    pub tick_size: f64,
    #[arg(long, default_value_t = 9.5)]
    pub m_factor: f64,
    /// Skip the quote-band filter.
    #[arg(long)]
    pub no_step1: bool,
    /// Write diagnostics here instead of standard error.
    #[arg(long)]
    pub diagnostics: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_parser = FAMILIES, default_value = "exponential")]
    pub trawl: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 20)]
    pub starts: usize,
    /// Seed of the multi-start design and of the optional bootstrap.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Paths for bootstrap standard errors; 0 skips the bootstrap.
    #[arg(long, default_value_t = 0)]
    pub bootstrap_paths: usize,
    #[arg(long)]
    pub output: PathBuf,
    /// Signature CSV; defaults to `<output stem>.signature.csv`.
    #[arg(long)]
    pub signature_output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PmfArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub t: f64,
    /// Even transform length; chosen automatically when absent.
    #[arg(long)]
    pub n_points: Option<usize>,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AcfArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 20)]
    pub k_max: usize,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SignatureArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Parameter or fit file for the `fitted` column.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BootstrapArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long, default_value_t = 500)]
    pub n_paths: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 72.03)]
    pub t0: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 75_600.0)]
    pub t1: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 7486)]
    pub v0: i64,
    #[arg(long, value_parser = FAMILIES, default_value = "exponential")]
    pub trawl: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 20)]
    pub starts: usize,
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "FLEETING_THREADS")]
    #[serde(skip)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub output: PathBuf,
}
