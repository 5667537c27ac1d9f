use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wlan_ctmc::sim::BackoffResume;

#[derive(Debug, Parser)]
#[command(name = "wlan-ctmc", version, about = "Throughput of overlapping WLANs: analytical model and CSMA/CA simulator")]
pub struct Cli {
    #[command(flatten)]
    pub format: FormatArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct FormatArgs {
    /// Report throughput in Mbit/s instead of bit/s.
    #[arg(long, global = true)]
    pub mbps: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-WLAN throughput from the analytical model.
    Analyze(AnalyzeArgs),
    /// Run the slotted CSMA/CA simulator.
    Simulate(SimulateArgs),
    /// Sweep CW_min or the node count and tabulate every mode.
    Sweep(SweepArgs),
    /// List feasible and dominant states.
    States(ScenarioArgs),
    /// Solve the single-domain DCF fixed point.
    Bianchi(BianchiArgs),
    /// γ and p against the number of contending nodes.
    GammaCurve(GammaCurveArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Builtin {
    I,
    Ii,
    Iii,
}

impl Builtin {
    pub fn name(self) -> &'static str {
        match self {
            Builtin::I => "i",
            Builtin::Ii => "ii",
            Builtin::Iii => "iii",
        }
    }
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Scenario JSON file.
    #[arg(long, conflicts_with = "builtin")]
    pub scenario: Option<PathBuf>,

    /// Built-in reference topology.
    #[arg(long, value_enum, default_value = "i")]
    pub builtin: Builtin,

    /// Nodes per WLAN; overrides the file when given.
    #[arg(long)]
    pub n_nodes: Option<u32>,

    /// Overrides CW_min.
    #[arg(long)]
    pub cw_min: Option<u32>,

    /// Overrides the number of backoff stages.
    #[arg(long)]
    pub m: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnalysisMode {
    Full,
    Dominant,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,

    #[arg(long, value_enum, default_value = "full")]
    pub mode: AnalysisMode,

    /// Ignore collisions (γ = 0): the plain CTMC.
    #[arg(long)]
    pub no_collisions: bool,

    /// Directory for throughput.csv, detail.csv and report.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Resume {
    CountBusy,
    Frozen,
}

impl From<Resume> for BackoffResume {
    fn from(r: Resume) -> Self {
        match r {
            Resume::CountBusy => BackoffResume::CountBusyPeriod,
            Resume::Frozen => BackoffResume::Frozen,
        }
    }
}

#[derive(Debug, Args)]
pub struct SimArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Simulated seconds per replication, warmup included.
    #[arg(long, default_value_t = wlan_ctmc::sim::DEFAULT_DURATION)]
    pub duration: f64,

    #[arg(long, default_value_t = wlan_ctmc::sim::DEFAULT_WARMUP)]
    pub warmup: f64,

    #[arg(long, default_value_t = wlan_ctmc::sim::DEFAULT_REPLICATIONS)]
    pub reps: usize,

    /// What a frozen counter does when the channel turns idle.
    #[arg(long, value_enum, default_value = "count-busy")]
    pub resume: Resume,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,

    #[command(flatten)]
    pub sim: SimArgs,

    /// Directory for simulation.csv, airtime.csv, probe.csv and report.json.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Write replication 0's channel events, one per line.
    #[arg(long)]
    pub event_log: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,

    #[arg(long, default_value = "cw-min")]
    pub param: String,

    /// Comma-separated values; defaults to 4,8,...,8192 for cw-min.
    #[arg(long, value_delimiter = ',')]
    pub values: Vec<u32>,

    /// Comma-separated subset of full, dominant, ctmc, sim.
    #[arg(long, value_delimiter = ',', default_value = "full,ctmc,sim")]
    pub modes: Vec<String>,

    /// Hold CW_max fixed while sweeping CW_min instead of m.
    #[arg(long)]
    pub fix_cw_max: bool,

    #[command(flatten)]
    pub sim: SimArgs,

    /// Output CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BianchiArgs {
    #[arg(long)]
    pub n_total: u32,

    #[arg(long, default_value_t = 32)]
    pub cw_min: u32,

    #[arg(long, default_value_t = 5)]
    pub m: u32,
}

#[derive(Debug, Args)]
pub struct GammaCurveArgs {
    #[arg(long, default_value_t = 32)]
    pub cw_min: u32,

    #[arg(long, default_value_t = 5)]
    pub m: u32,

    /// Nodes in the tagged WLAN.
    #[arg(long, default_value_t = 1)]
    pub tagged_nodes: u32,

    #[arg(long, default_value_t = 64)]
    pub max_contenders: u32,

    /// Output CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
