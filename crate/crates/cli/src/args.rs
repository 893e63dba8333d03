use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cvcomp::Quantity;

pub const OUT_DIR_ENV: &str = "CVCOMP_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "cvcomp",
    version,
    about = "Complementarity of truncated two-mode squeezed states",
    after_help = "ENVIRONMENT:\n  CVCOMP_OUT_DIR  directory for sweep output when --output is not given\n\nEXIT STATUS:\n  0 success, 1 failed check or I/O error, 2 usage error"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate a figure quantity over a (r or xi) x t grid.
    #[command(
        after_help = "ENVIRONMENT:\n  CVCOMP_OUT_DIR  directory for output when --output is not given;\n                  files are named figure<N>.<ext> or <quantity>.<ext>"
    )]
    Sweep(SweepArgs),
    /// Check the closed-form identities and print one PASS/FAIL line each.
    Verify(VerifyArgs),
    /// Simulate homodyne data and estimate the variance matrix and C_I^2.
    Estimate(EstimateArgs),
    /// Reduce the beam-splitter state to a TMSS with local anti-squeezing.
    ReduceDemo(ReduceDemoArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetState {
    Tmss,
    Beamsplitter,
}

fn parse_quantity(s: &str) -> Result<Quantity, String> {
    s.parse().map_err(|e: cvcomp::Error| e.to_string())
}

/// Cut-off values: an explicit list or an inclusive range.
#[derive(Debug, Clone, Args)]
pub struct CutoffArgs {
    /// Comma-separated cut-offs, e.g. 5,10,15,20
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["t_min", "t_max"])]
    pub t_list: Option<Vec<usize>>,
    /// First cut-off of an inclusive range [default: 1]
    #[arg(long)]
    pub t_min: Option<usize>,
    /// Last cut-off of an inclusive range [default: 50]
    #[arg(long)]
    pub t_max: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// predictability | fidelity | iconcurrence | vm-discrepancy
    #[arg(long, value_parser = parse_quantity, required_unless_present = "figure")]
    pub quantity: Option<Quantity>,
    /// Preset grid and quantity of figure 1-4
    #[arg(
        long,
        value_parser = clap::value_parser!(u8).range(1..=4),
        conflicts_with_all = ["quantity", "r_min", "r_max", "r_step", "xi_min", "xi_max", "xi_step", "t_list", "t_min", "t_max"]
    )]
    pub figure: Option<u8>,
    /// [default: 0]
    #[arg(long, allow_negative_numbers = true)]
    pub r_min: Option<f64>,
    /// [default: 3]
    #[arg(long, allow_negative_numbers = true)]
    pub r_max: Option<f64>,
    /// [default: 0.05]
    #[arg(long, allow_negative_numbers = true)]
    pub r_step: Option<f64>,
    /// Sweep xi = tanh r instead of r [default: 0]
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["r_min", "r_max", "r_step"])]
    pub xi_min: Option<f64>,
    /// [default: 0.99]
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["r_min", "r_max", "r_step"])]
    pub xi_max: Option<f64>,
    /// [default: 0.01]
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["r_min", "r_max", "r_step"])]
    pub xi_step: Option<f64>,
    #[command(flatten)]
    pub cutoffs: CutoffArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; "-" for stdout. Defaults to $CVCOMP_OUT_DIR/<name>.<ext>,
    /// or stdout when the variable is unset.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, env = OUT_DIR_ENV, hide = true)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub r_min: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    pub r_max: f64,
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub r_step: f64,
    #[command(flatten)]
    pub cutoffs: CutoffArgs,
    /// Corrupt V13 by one part in 10^6 before checking (negative control)
    #[arg(long)]
    pub fault_inject: bool,
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    #[arg(long, value_enum, default_value_t = TargetState::Tmss)]
    pub state: TargetState,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub r: f64,
    /// Apply the local anti-squeeze before sampling (beamsplitter only)
    #[arg(long)]
    pub reduce: bool,
    #[arg(long, default_value_t = 1_000_000)]
    pub shots: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct ReduceDemoArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub r: f64,
}
