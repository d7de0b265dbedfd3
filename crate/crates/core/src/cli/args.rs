use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "leomec",
    version,
    about = "Coverage, association and delay of satellite-assisted mobile edge computing"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form evaluation over a parameter sweep.
    Analytic(AnalyticArgs),
    /// Monte Carlo estimates over a parameter sweep.
    Simulate(SimulateArgs),
    /// Closed forms and Monte Carlo side by side with gaps and tolerances.
    Compare(SimulateArgs),
    /// Average delay of commercial constellations.
    Preset(PresetArgs),
    /// Integrated network against satellite-only and server-only operation.
    Baselines(SweepArgs),
    /// Runs the oracle and invariant suite and prints pass/fail per check.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Scenario file (TOML). Defaults to the bundled reference scenario.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override a config value, e.g. `--set constellation.altitude_km=800`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Master seed for the simulator.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo trials per task class.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
    /// Sweep a variable, e.g. `--sweep satellites=200,600,1000`. Repeat to
    /// sweep the Cartesian product; the first sweep varies slowest.
    #[arg(long = "sweep", value_name = "VAR=V1,V2,...")]
    pub sweep: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyticArgs {
    #[command(flatten)]
    pub sweep: SweepArgs,
    /// Which tiers are operational.
    #[arg(long, default_value = "integrated")]
    pub variant: String,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub sweep: SweepArgs,
    /// Write every trial to this CSV file.
    #[arg(long)]
    pub dump_trials: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetMode {
    Analytic,
    Simulate,
}

#[derive(Debug, Clone, Args)]
pub struct PresetArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub out: PathBuf,
    /// Preset name; all presets when omitted.
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long, value_enum, default_value = "analytic")]
    pub mode: PresetMode,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Also write the report as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
