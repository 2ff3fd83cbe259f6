use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "thermocap", version, about = "One-shot capacities, smoothed entropies and work extraction")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExecMode {
    Parallel,
    Sequential,
}

#[derive(Debug, Args)]
pub struct Global {
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value = "parallel")]
    pub exec: ExecMode,
    /// Bath temperature used to rescale work values reported in k_BT.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub temperature: f64,
    #[command(flatten)]
    pub budget: Budget,
}

#[derive(Debug, Args)]
pub struct Budget {
    /// Codebooks enumerated per message count before the search gives up or samples.
    #[arg(long, global = true)]
    pub budget_codebooks: Option<u64>,
    /// Sample codebooks past the enumeration budget (results become lower brackets).
    #[arg(long, global = true)]
    pub budget_randomized: bool,
    #[arg(long, global = true)]
    pub budget_samples: Option<usize>,
    /// Largest message count in search-based lower estimates.
    #[arg(long, global = true)]
    pub budget_messages: Option<usize>,
    /// Codebooks (or encoders) per message count in search-based estimates.
    #[arg(long, global = true)]
    pub budget_family: Option<usize>,
    /// Random members added to search-based estimates.
    #[arg(long, global = true)]
    pub budget_random: Option<usize>,
    /// Exact work atoms kept before switching to binning.
    #[arg(long, global = true)]
    pub budget_atoms: Option<usize>,
    #[arg(long, global = true)]
    pub budget_mc_samples: Option<usize>,
    /// Candidate subsets turned into work protocols.
    #[arg(long, global = true)]
    pub budget_candidates: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Relative entropies of two distributions.
    Entropy {
        #[arg(value_enum)]
        kind: EntropyKind,
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        q: PathBuf,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// One-shot capacity by exhaustive codebook search.
    Capacity {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        eps: f64,
        /// Restrict to codebooks that keep the uniform law within 2·theta.
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        max_m: Option<usize>,
    },
    /// Deterministic work extractable from a state.
    Workext {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        eps: f64,
        /// Window half-width in k_BT; the tightest window when omitted.
        #[arg(long)]
        delta: Option<f64>,
        #[command(flatten)]
        protocol: Protocol,
    },
    /// Work extractable from the correlations of a joint distribution.
    Wcorr {
        #[arg(long)]
        joint: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: Option<f64>,
        #[command(flatten)]
        protocol: Protocol,
    },
    /// Check a chain of bounds on a channel and report a verdict.
    Bounds {
        #[arg(value_enum)]
        check: BoundCheck,
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        theta: Option<f64>,
    },
    /// Simulate sending a shared correlated state through a channel and extracting its work.
    Landauer {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        trials: usize,
    },
    /// Finite-size convergence data.
    Asymptotics {
        #[command(subcommand)]
        which: Asymptotics,
    },
}

#[derive(Debug, Args)]
pub struct Protocol {
    #[arg(long)]
    pub ecut: Option<f64>,
    #[arg(long)]
    pub ksteps: Option<usize>,
    #[arg(long, value_enum)]
    pub schedule: Option<ScheduleArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScheduleArg {
    ThermodynamicLength,
    UniformEnergy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EntropyKind {
    /// Smoothed Renyi-0 relative entropy.
    D0,
    /// Hypothesis-testing relative entropy.
    Dh,
    /// Kullback-Leibler divergence.
    Rel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundCheck {
    /// Hypothesis-testing lower estimate <= capacity <= Renyi-0 witness (bits).
    Capacity,
    /// Correlation-work lower estimate <= ln2·capacity <= work witness (k_BT).
    Work,
    /// Capacity <= equilibrium capacity <= correlation surrogate (bits).
    Equilibrium,
}

#[derive(Debug, Subcommand)]
pub enum Asymptotics {
    /// (1/n) D_h of i.i.d. binary laws against their relative entropy.
    Stein {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        q: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1000)]
        n_max: usize,
    },
    /// Regularised one-shot capacities of channel powers against the Shannon capacity.
    CapacitySeries {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 3)]
        k_max: usize,
        #[arg(long)]
        theta: Option<f64>,
    },
    /// Search estimate of the equilibrium-constrained mutual information.
    ChiBar {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        theta: f64,
    },
    /// Shannon capacity by alternating maximisation.
    Shannon {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}
