//! `dualent`: reproducible runs of the dual-entanglement scenarios.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 domain error.

mod commands;
mod config;
mod output;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(name = "dualent", version, about = "Dual entanglement of identical particles")]
pub struct Cli {
    /// Seed for Monte Carlo sampling (default 42).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Directory for output files.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Both)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dual representation, concurrences and factorizability of a pair state.
    Dual(DualArgs),
    /// CHSH value of the routed dual state, at given or optimized settings.
    Chsh(ChshArgs),
    /// Monte Carlo coincidence experiment; writes result.json and counts.csv.
    Simulate(SimulateArgs),
    /// Optimized CHSH against the identicity overlap v.
    IdenticitySweep(SweepArgs),
    /// Optimized CHSH over a (d1, d2) grid of the trap-and-fly sequence.
    Decohere(DecohereArgs),
    /// Cooling threshold below which arrival times do not tell the objects apart.
    Temperature(TemperatureArgs),
}

#[derive(Debug, Args)]
pub struct DualArgs {
    #[arg(long, allow_hyphen_values = true, default_value = "0.7071067811865476")]
    pub alpha: String,
    #[arg(long, allow_hyphen_values = true, default_value = "0.7071067811865476")]
    pub beta: String,
    #[arg(long, default_value = "boson")]
    pub stat: String,
    /// Label variable as `name:first,second`.
    #[arg(long, allow_hyphen_values = true, default_value = "momentum:-k,k")]
    pub label_var: String,
    /// Entangled variable as `name:first,second`.
    #[arg(long, allow_hyphen_values = true, default_value = "polarization:H,V")]
    pub entangled_var: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum StateChoice {
    /// Equal-weight photon pair.
    Maximal,
    /// `|H>_{-k} |V>_k`.
    Product,
    /// Amplitudes from --alpha / --beta.
    Custom,
}

#[derive(Debug, Args)]
pub struct SettingArgs {
    /// First-party setting `theta,phi` (radians).
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub a_prime: Option<String>,
    /// Second-party setting `theta,phi` (radians).
    #[arg(long)]
    pub b: Option<String>,
    #[arg(long)]
    pub b_prime: Option<String>,
}

#[derive(Debug, Args)]
pub struct ChshArgs {
    #[arg(long, value_enum, default_value_t = StateChoice::Maximal)]
    pub state: StateChoice,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    #[arg(long, default_value = "boson")]
    pub stat: String,
    /// Identicity overlap v in [0, 1].
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub overlap: f64,
    /// Search for the maximal violation (default when no settings are given).
    #[arg(long)]
    pub optimize: bool,
    #[command(flatten)]
    pub settings: SettingArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Run file with `key = value` lines; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    #[arg(long)]
    pub stat: Option<String>,
    /// Pairs per setting pair.
    #[arg(long, short = 'n')]
    pub pairs: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub overlap: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub efficiency: Option<String>,
    #[command(flatten)]
    pub settings: SettingArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Overlap grid `start:stop:step` or a single value.
    #[arg(long, allow_hyphen_values = true, default_value = "0:1:0.1")]
    pub v: String,
}

#[derive(Debug, Args)]
pub struct DecohereArgs {
    /// Identicity-loss rate, 1/s.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub gamma_id: f64,
    /// Path-decoherence rate, 1/s.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub gamma_path: f64,
    /// d1 grid in metres.
    #[arg(long, allow_hyphen_values = true, default_value = "0:1:0.1")]
    pub d1: String,
    /// d2 grid in metres.
    #[arg(long, allow_hyphen_values = true, default_value = "0:1:0.1")]
    pub d2: String,
    /// Transport speed, m/s.
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub speed: f64,
}

#[derive(Debug, Args)]
pub struct TemperatureArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub mass_number: f64,
    /// Position spread in metres.
    #[arg(long, allow_hyphen_values = true)]
    pub dx: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let workers = match commands::workers_from_env() {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .expect("thread pool");
    match pool.install(|| commands::run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
