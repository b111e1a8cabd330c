use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "chemoeda",
    version,
    about = "Chemotherapy scheduling with evolutionary optimizers"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Seed for runs and censuses; for experiments, overrides the spec's base seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory output files are written to.
    #[arg(long, global = true, env = "CHEMOEDA_OUT", default_value = ".")]
    pub out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// More log output; repeat for debug.
    #[arg(short, long, global = true, action = ArgAction::Count)]
    pub verbose: u8,
    /// Setting override `key=value` (optimizer, experiment or instance key). Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check an instance file and report the untreated tumour trajectory.
    Validate {
        /// Instance file (default: the bundled instance).
        instance: Option<PathBuf>,
    },
    /// Run one optimizer once and write its record and trace.
    Run(RunArgs),
    /// Run an experiment spec and write its results file.
    Experiment(ExperimentArgs),
    /// Pairwise Welch t-tests between results files.
    Compare {
        #[arg(required = true, num_args = 2..)]
        files: Vec<PathBuf>,
    },
    /// Census of interacting bit pairs.
    Linkage(LinkageArgs),
    /// `label,mean,std` rows for bar charts with error bars.
    Plotdata {
        #[arg(required = true, num_args = 1..)]
        files: Vec<PathBuf>,
    },
    /// Smallest population that finds a feasible schedule reliably.
    Bisect(BisectArgs),
}

#[derive(Debug, Args)]
pub struct OptimizerFlags {
    /// Instance file (default: the bundled instance).
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long)]
    pub pop: Option<usize>,
    /// `tournament:K`, `truncation:N` or `truncation:F` with F < 1.
    #[arg(long)]
    pub select: Option<String>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// ga, umda, pbil or hboa.
    pub kind: String,
    #[command(flatten)]
    pub opt: OptimizerFlags,
    /// Evaluation budget.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Stop once a feasible schedule has been evaluated.
    #[arg(long)]
    pub stop_on_feasible: bool,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    pub spec: PathBuf,
    /// Instance file, overriding the spec's `instance`.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub cap: Option<u64>,
}

#[derive(Debug, Args)]
pub struct LinkageArgs {
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Random backgrounds probed per pair.
    #[arg(long, default_value_t = 1)]
    pub backgrounds: usize,
    /// Relative detection tolerance.
    #[arg(long, default_value_t = chemoeda::linkage::DEFAULT_TOLERANCE)]
    pub tol: f64,
    /// Probe onemax of this length instead of the instance.
    #[arg(long, hide = true)]
    pub onemax: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BisectArgs {
    pub kind: String,
    #[command(flatten)]
    pub opt: OptimizerFlags,
    /// Evaluation cap per trial.
    #[arg(long, default_value_t = 200_000)]
    pub cap: u64,
    #[arg(long, default_value_t = 16)]
    pub lo: usize,
    #[arg(long, default_value_t = 32)]
    pub hi: usize,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    /// Fraction of trials that must find a feasible schedule.
    #[arg(long, default_value_t = 0.9)]
    pub target_rate: f64,
    /// Largest population tried.
    #[arg(long, default_value_t = 100_000)]
    pub max_pop: usize,
}
