mod commands;
mod config;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nnls::NnlsError;

/// Exact diagonalization, metric and Bethe-ansatz checks for the quantum
/// nonlocal NLS / delta Bose gas, plus the classical field integrator.
#[derive(Debug, Parser)]
#[command(name = "nnls", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues and residuals of H in one particle-number sector (CSV).
    Spectrum(SpectrumArgs),
    /// Dirac or parity Gram matrix of a sector (dense CSV).
    Gram(GramArgs),
    /// 𝒫-Hermiticity, realness and commutator report (JSON).
    Hermiticity(HermiticityArgs),
    /// Lippmann–Schwinger series about a free reference state (JSON).
    LsSeries(LsSeriesArgs),
    /// Cusp and finite-difference checks of a Bethe wavefunction (JSON).
    BetheVerify(BetheVerifyArgs),
    /// Solves the ring quantization conditions (JSON).
    RingBethe(RingBetheArgs),
    /// Two-body bound state: analytic, diagonalization and FD (JSON).
    BoundState(BoundStateArgs),
    /// Integrates the classical field and records the charges (CSV).
    Evolve(EvolveArgs),
    /// Lowest levels against the mode cutoff (CSV).
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SectorFlags {
    /// Box length L.
    #[arg(long)]
    pub length: Option<f64>,
    /// Mode cutoff M (modes −M..M).
    #[arg(long)]
    pub modes: Option<u32>,
    /// Particle number n.
    #[arg(long)]
    pub particles: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub sector: SectorFlags,
    #[arg(long, allow_hyphen_values = true)]
    pub coupling: Option<f64>,
    /// Total-momentum index K (all blocks when omitted).
    #[arg(long, allow_hyphen_values = true)]
    pub momentum_block: Option<i64>,
}

#[derive(Debug, Args)]
pub struct GramArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub sector: SectorFlags,
    /// `dirac` or `parity`.
    #[arg(long)]
    pub kind: Option<String>,
    /// Also write the basis order as `index,modes`.
    #[arg(long)]
    pub basis_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HermiticityArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub sector: SectorFlags,
    #[arg(long, allow_hyphen_values = true)]
    pub coupling: Option<f64>,
}

#[derive(Debug, Args)]
pub struct LsSeriesArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub sector: SectorFlags,
    #[arg(long, allow_hyphen_values = true)]
    pub coupling: Option<f64>,
    /// Series order.
    #[arg(long)]
    pub order: Option<usize>,
    /// Reference state as comma-separated mode labels.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub reference: Option<Vec<i32>>,
}

#[derive(Debug, Args)]
pub struct BetheVerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Rapidities, comma separated.
    #[arg(long = "k", value_delimiter = ',', allow_hyphen_values = true)]
    pub rapidities: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    pub coupling: Option<f64>,
    /// Finite-difference points per dimension.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Finite-difference box edge.
    #[arg(long = "box")]
    pub box_length: Option<f64>,
    /// Seed for the random cusp sample points.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of random cusp sample points.
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RingBetheArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub length: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub coupling: Option<f64>,
    /// Quantum numbers, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub quantum_numbers: Option<Vec<i64>>,
}

#[derive(Debug, Args)]
pub struct BoundStateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub length: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub coupling: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub total_momentum: Option<f64>,
    /// Mode cutoffs for the diagonalization, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub cutoffs: Option<Vec<u32>>,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long = "box")]
    pub box_length: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub length: Option<f64>,
    /// Mode cutoff M; the grid has 2M+1 sites.
    #[arg(long)]
    pub modes: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub coupling: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Record charges every this many steps.
    #[arg(long)]
    pub every: Option<usize>,
    /// `gaussian` or `plane-wave`.
    #[arg(long)]
    pub initial: Option<String>,
    #[arg(long)]
    pub amplitude: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub center: Option<f64>,
    #[arg(long)]
    pub width: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub wavenumber: Option<f64>,
    /// Plane-wave mode index.
    #[arg(long, allow_hyphen_values = true)]
    pub mode: Option<i32>,
    /// Final field as `x,re,im` CSV.
    #[arg(long)]
    pub snapshot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub length: Option<f64>,
    #[arg(long)]
    pub particles: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub coupling: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub momentum_block: Option<i64>,
    #[arg(long, value_delimiter = ',')]
    pub cutoffs: Option<Vec<u32>>,
    #[arg(long)]
    pub levels: Option<usize>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Core(NnlsError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<NnlsError> for CliError {
    fn from(e: NnlsError) -> Self { CliError::Core(e) }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self { CliError::Io(e.to_string()) }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
