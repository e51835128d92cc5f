mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use greedy_cs::pursuit::SelectionPolicy;

/// Weak orthogonal matching pursuit and dictionary recovery guarantees.
///
/// Atom indices are 1-based in every input and output.
#[derive(Debug, Parser)]
#[command(name = "greedy-cs", version, about)]
pub struct Cli {
    /// Suppress progress lines on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded random dictionary and write it as CSV.
    Gen(GenArgs),
    /// Mutual coherence M and global 2-coherence nu_k.
    Coherence(CoherenceArgs),
    /// Restricted isometry constant delta_k, exact or bounded.
    Ric(RicArgs),
    /// Evaluate a recovery condition or bound on a dictionary.
    Verify(VerifyArgs),
    /// Run WOMP on an observation.
    Recover(RecoverArgs),
    /// Run a randomized sweep described by a config file.
    Sweep(SweepArgs),
    /// Search for a dictionary where the RIC condition holds but the older bound fails.
    SearchSeparation(SeparationArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Kind {
    Gaussian,
    PerturbedIdentity,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    /// Perturbation scale for perturbed-identity.
    #[arg(long, default_value_t = 0.1)]
    pub scale: f64,
    /// Master seed (falls back to GREEDY_CS_SEED, then 0).
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    /// CSV matrix, one row per line; '#' starts a comment.
    #[arg(long)]
    pub matrix: PathBuf,
    /// Rescale columns to unit norm instead of rejecting them.
    #[arg(long)]
    pub renormalize: bool,
    /// Maximum number of subsets enumerated for exact delta_k.
    #[arg(long)]
    pub ric_budget: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CoherenceArgs {
    #[command(flatten)]
    pub matrix: MatrixArgs,
    #[arg(long)]
    pub k: usize,
    /// Also evaluate nu_k by subset enumeration and report both.
    #[arg(long)]
    pub brute: bool,
}

#[derive(Debug, Args)]
pub struct RicArgs {
    #[command(flatten)]
    pub matrix: MatrixArgs,
    #[arg(long)]
    pub k: usize,
    /// Enumerate every k-subset (fails above the budget).
    #[arg(long, conflicts_with = "bounds")]
    pub exact: bool,
    /// Report only coherence-based lower and upper bounds.
    #[arg(long)]
    pub bounds: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Check {
    Lemma1,
    Lemma2,
    Theorem1,
    Corollary1,
    Corollary2,
    Compare,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub check: Check,
    #[command(flatten)]
    pub matrix: MatrixArgs,
    /// Sparsity level (taken from the signal when one is given).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    /// Noise level epsilon.
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    /// Dense coefficient vector of length d.
    #[arg(long)]
    pub signal: Option<PathBuf>,
    /// Noise vector of length n for the correlation bounds (default: seeded noise of norm eps).
    #[arg(long)]
    pub noise: Option<PathBuf>,
    /// Seed for generated noise (falls back to GREEDY_CS_SEED, then 0).
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Policy {
    Max,
    First,
    Min,
}

impl From<Policy> for SelectionPolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Max => SelectionPolicy::MaxCorrelation,
            Policy::First => SelectionPolicy::FirstAboveThreshold,
            Policy::Min => SelectionPolicy::MinAboveThreshold,
        }
    }
}

#[derive(Debug, Args)]
pub struct RecoverArgs {
    #[command(flatten)]
    pub matrix: MatrixArgs,
    /// Observation vector f of length n.
    #[arg(long)]
    pub signal_obs: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    #[arg(long, value_enum, default_value_t = Policy::Max)]
    pub policy: Policy,
    #[arg(long)]
    pub max_iter: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out_csv: PathBuf,
    #[arg(long)]
    pub out_summary: Option<PathBuf>,
    /// Two-column success-rate table over the config's plot_axis.
    #[arg(long)]
    pub out_plot: Option<PathBuf>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SeparationArgs {
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 5000)]
    pub max_attempts: usize,
    #[arg(long)]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
