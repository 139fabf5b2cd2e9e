use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "r3", version, about = "Reliability, robustness and resilience assessment of DC power networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Log progress at debug level.
    #[arg(long, global = true)]
    pub verbose: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sequential Monte Carlo reliability indicators.
    Reliability(ReliabilityArgs),
    /// Cascading-failure sweep over initiating events and alphas.
    Robustness(RobustnessArgs),
    /// Staged restoration from a disintegrated state.
    Resilience(ResilienceArgs),
    /// All three assessments for several variants, then the report.
    Pipeline(PipelineArgs),
    /// Combined report from existing results.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CaseArgs {
    /// Case file (JSON). Defaults to the built-in IEEE RTS-24.
    #[arg(long)]
    pub case: Option<PathBuf>,

    /// Topology variant (1 = case as given, 2..=8 add lines).
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=8))]
    pub variant: u8,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Output root; results go to <out>/<variant>/<command>/.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,

    /// Worker threads (default: available cores).
    #[arg(long)]
    pub workers: Option<usize>,
}

impl RunArgs {
    pub fn worker_count(&self) -> usize {
        self.workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
            .max(1)
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct MonteCarloArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// Maximum simulated years.
    #[arg(long, visible_alias = "max-years", default_value_t = 1500)]
    pub years: usize,

    /// Coefficient-of-variation threshold on EENS.
    #[arg(long, default_value_t = 0.05)]
    pub cov: f64,

    /// Years simulated before convergence is tested.
    #[arg(long, default_value_t = 10)]
    pub min_years: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CascadeArgs {
    /// Overload tolerances to sweep.
    #[arg(long, value_delimiter = ',', default_value = "1,1.1,1.2,1.3,1.4,1.5")]
    pub alphas: Vec<f64>,

    /// Capacity floor at 5% of rating.
    #[arg(long, value_enum, default_value_t = Switch::Off)]
    pub floor: Switch,

    /// Restrict events to these buses.
    #[arg(long, value_delimiter = ',')]
    pub event_buses: Option<Vec<u32>>,

    /// Buses never used as initiating events (default: 6,9,14,15,24 on 24-bus cases, none otherwise).
    #[arg(long, value_delimiter = ',')]
    pub exclude_buses: Option<Vec<u32>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LimitsArg {
    Cascade,
    Thermal,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct RecoveryArgs {
    /// Maximum lines closed per restoration step.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub nc: u32,

    #[arg(long, default_value_t = 15.0)]
    pub step_minutes: f64,

    /// Line limits during restoration.
    #[arg(long, value_enum, default_value_t = LimitsArg::Cascade)]
    pub limits: LimitsArg,
}

#[derive(Debug, Clone, Args)]
pub struct ReliabilityArgs {
    #[command(flatten)]
    pub case: CaseArgs,
    #[command(flatten)]
    pub mc: MonteCarloArgs,
    /// Bus angle bound, radians.
    #[arg(long, default_value_t = 0.6)]
    pub angle_bound: f64,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RobustnessArgs {
    #[command(flatten)]
    pub case: CaseArgs,
    #[command(flatten)]
    pub cascade: CascadeArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ResilienceArgs {
    #[command(flatten)]
    pub case: CaseArgs,
    #[command(flatten)]
    pub recovery: RecoveryArgs,
    #[arg(long, default_value_t = 0.6)]
    pub angle_bound: f64,

    /// Start from this topology-state JSON instead of the robustness result.
    /// Cascade limits then use the first `--alphas` value.
    #[arg(long)]
    pub state: Option<PathBuf>,

    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub alphas: Vec<f64>,

    #[arg(long, value_enum, default_value_t = Switch::Off)]
    pub floor: Switch,

    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub case: Option<PathBuf>,

    /// Variants to run.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8",
          value_parser = clap::value_parser!(u8).range(1..=8))]
    pub variants: Vec<u8>,

    #[command(flatten)]
    pub mc: MonteCarloArgs,
    #[command(flatten)]
    pub cascade: CascadeArgs,
    #[command(flatten)]
    pub recovery: RecoveryArgs,
    #[arg(long, default_value_t = 0.6)]
    pub angle_bound: f64,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    #[arg(long, default_value = "out")]
    pub out: PathBuf,

    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8",
          value_parser = clap::value_parser!(u8).range(1..=8))]
    pub variants: Vec<u8>,
}
