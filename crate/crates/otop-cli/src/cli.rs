//! Argument definitions and dispatch.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::{commands, Algorithm, CliError};

#[derive(Debug, Parser)]
#[command(
    name = "otop",
    version,
    about = "Open-route planning for fleets that revisit weighted points of interest"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random Euclidean instance file
    Generate(GenerateArgs),
    /// Solve an instance and write a solution file
    Solve(SolveArgs),
    /// Re-check a solution file against its instance
    Validate(ValidateArgs),
    /// Run a benchmark spec: CSV table, solution files, and SVG plots
    Bench(BenchArgs),
    /// Build an instance from a road network with reward-carrying arcs
    Augment(AugmentArgs),
    /// Convert plain-text POI tables (x y weight) into instance files
    ConvertDataset(ConvertDatasetArgs),
}

#[derive(Debug, clap::Args)]
pub struct GenerateArgs {
    /// Number of POIs
    #[arg(long)]
    pub n: usize,
    /// Number of agents (routes)
    #[arg(long, default_value_t = 4)]
    pub fleet: usize,
    /// Per-route travel budget
    #[arg(long, default_value_t = 30.0)]
    pub budget: f64,
    /// Reward exponent in (0, 1)
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    /// Weight distribution: int:LO..HI or real:LO..HI
    #[arg(long, default_value = "int:1..3")]
    pub weight_dist: String,
    /// Side length of the coordinate square
    #[arg(long, default_value_t = 50.0)]
    pub square: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output instance file
    #[arg(long)]
    pub out: PathBuf,
    /// Instance name stored in the file
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, clap::Args)]
pub struct SolveArgs {
    /// Instance file
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum)]
    pub algorithm: Algorithm,
    /// RNG seed (overrides the config file's seed)
    #[arg(long)]
    pub seed: Option<u64>,
    /// TOML file overriding any search-configuration field
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output solution file
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the per-iteration search trace as CSV (alns only)
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Bypass the exact solver's instance-size guard
    #[arg(long)]
    pub force: bool,
    /// Override the instance's fleet size
    #[arg(long)]
    pub fleet: Option<usize>,
    /// Override the instance's budget
    #[arg(long)]
    pub budget: Option<f64>,
    /// Override the instance's reward exponent
    #[arg(long)]
    pub beta: Option<f64>,
}

#[derive(Debug, clap::Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub solution: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct BenchArgs {
    /// Benchmark spec file
    #[arg(long)]
    pub spec: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct AugmentArgs {
    /// Road network file (nodes and arcs)
    #[arg(long)]
    pub network: PathBuf,
    /// Reward arcs file
    #[arg(long)]
    pub reward_arcs: PathBuf,
    /// Output instance file
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    #[arg(long)]
    pub budget: f64,
    #[arg(long)]
    pub fleet: usize,
    /// Delete each rewarded arc instead of keeping it in parallel with the
    /// split path
    #[arg(long)]
    pub drop_original: bool,
}

#[derive(Debug, clap::Args)]
pub struct ConvertDatasetArgs {
    /// A POI table file, or a directory of them
    #[arg(long)]
    pub input: PathBuf,
    /// Output instance file (single input) or directory
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    #[arg(long)]
    pub budget: f64,
    #[arg(long, default_value_t = 1)]
    pub fleet: usize,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Generate(args) => commands::generate(args),
        Command::Solve(args) => commands::solve(args),
        Command::Validate(args) => commands::validate(args),
        Command::Bench(args) => commands::bench(args),
        Command::Augment(args) => commands::augment(args),
        Command::ConvertDataset(args) => commands::convert_dataset(args),
    }
}
