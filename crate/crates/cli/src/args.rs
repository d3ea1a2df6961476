use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "gamedyn", version, about = "Learning dynamics and stability analysis for finite games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify the game as strictly, null or hypo-monotone.
    Classify {
        #[command(flatten)]
        game: GameArgs,
        /// Random interior profiles probed when the game map is nonlinear.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Find the perturbed equilibria (rest points) at a temperature.
    Solve {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        /// Number of random starting points in addition to the origin.
        #[arg(long, default_value_t = 20)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Integrate the learning dynamics from seeded initial scores.
    Simulate(Box<SimulateArgs>),
    /// Locate the temperature where the rest point loses stability.
    Bifurcation {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, value_enum, default_value_t = ContinuousScheme::FirstOrder)]
        scheme: ContinuousScheme,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long = "K", default_value_t = 1.0)]
        k: f64,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 0.05)]
        eps_min: f64,
        #[arg(long, default_value_t = 5.0)]
        eps_max: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the built-in checks for one example, or all variants of a number.
    Reproduce {
        id: String,
        /// Print the report as JSON instead of a table.
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// List the preset games and the reproducible example ids.
    ListGames,
}

#[derive(Debug, Args)]
pub struct GameArgs {
    /// Built-in game, see `list-games`.
    #[arg(long, conflicts_with = "game", required_unless_present = "game")]
    pub preset: Option<String>,
    /// Preset parameter as key=value; repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    /// JSON game file.
    #[arg(long, value_name = "FILE")]
    pub game: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Directory for artifacts; GAMEDYN_OUT takes precedence.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ContinuousScheme {
    FirstOrder,
    HigherOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    FirstOrder,
    HigherOrder,
    Discrete,
    Stochastic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    FullInfo,
    Bandit,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long, value_enum, default_value_t = SchemeArg::FirstOrder)]
    pub scheme: SchemeArg,
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// High-pass gain of the higher-order scheme.
    #[arg(long = "K", default_value_t = 1.0)]
    pub k: f64,
    /// High-pass corner frequency of the higher-order scheme.
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long, default_value_t = 500.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 10)]
    pub record_every: usize,
    /// Comma-separated seeds; `a..b` expands to a half-open range.
    #[arg(long, default_value = "0")]
    pub seeds: String,
    /// Add 2-D ternary coordinates for three-action players.
    #[arg(long)]
    pub emit_ternary: bool,
    /// Step of the Euler recursion, or initial step of the stochastic one.
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    /// Number of stochastic updates.
    #[arg(long, default_value_t = 20_000)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = EstimatorArg::Bandit)]
    pub estimator: EstimatorArg,
    #[command(flatten)]
    pub output: OutputArgs,
}
