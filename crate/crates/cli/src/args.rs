use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use tokenwalk::token_graph::{DEFAULT_DENSE_CAP, DEFAULT_ENUMERATION_CAP, DEFAULT_TOKEN_CAP};
use tokenwalk::Dynamics;

#[derive(Parser, Debug)]
#[command(name = "tokenwalk", version, about = "Densest k-subgraph sampling on token graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample densest k-subgraphs of a regular graph
    Sample(SampleArgs),
    /// Dump the stationary law and transition matrix of a small token chain
    Exact(ExactArgs),
    /// Evaluate the mixing-time thresholds
    Bounds(BoundsArgs),
    /// Check the token-graph identities on an input graph
    Verify(VerifyArgs),
    /// Export the explicit k-token graph
    Tokengraph(TokenGraphArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Caps {
    /// Largest token graph built explicitly
    #[arg(long, default_value_t = DEFAULT_TOKEN_CAP)]
    pub token_cap: u128,
    /// Largest state space for exact matrix work
    #[arg(long, default_value_t = DEFAULT_DENSE_CAP)]
    pub dense_cap: u128,
    /// Largest number of subsets enumerated by oracles
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub enumeration_cap: u128,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SampleArgs {
    /// Edge-list file
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Steps discarded before recording; derived from the mixing bound if omitted
    #[arg(long)]
    pub burn_in: Option<u64>,
    #[arg(long, default_value = "loop", value_parser = parse_dynamics)]
    pub dynamics: Dynamics,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Constant of the lazy-branch bound
    #[arg(long, default_value_t = 1.0)]
    pub lazy_constant: f64,
    /// Ranked subsets kept in the report
    #[arg(long, default_value_t = 20)]
    pub top: usize,
    /// Also write the report here
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub caps: Caps,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ExactArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value = "loop", value_parser = parse_dynamics)]
    pub dynamics: Dynamics,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub caps: Caps,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BoundsArgs {
    /// Edge-list file; replaces --n and --d and adds the laziness analysis
    #[arg(long, conflicts_with_all = ["n", "d"])]
    pub input: Option<PathBuf>,
    #[arg(long, required_unless_present = "input")]
    pub n: Option<usize>,
    #[arg(long, required_unless_present = "input")]
    pub d: Option<usize>,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lazy_constant: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub caps: Caps,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Particle count to check; every k whose token graph fits the dense cap if omitted
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub caps: Caps,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct TokenGraphArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub k: usize,
    /// Edge list of the token graph; the subset table goes to <output>.subsets
    #[arg(long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub caps: Caps,
}

fn parse_dynamics(s: &str) -> Result<Dynamics, String> {
    s.parse().map_err(|e: tokenwalk::Error| e.to_string())
}

