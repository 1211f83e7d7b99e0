//! Command-line front end: configuration parsing, run dispatch and output
//! files.

pub mod commands;
pub mod config;
pub mod expr;

use std::path::PathBuf;

use absubdiff_core::principles::{TheoremId, DEFAULT_TOL};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Process exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass = 0,
    Failed = 1,
    ConfigError = 2,
    SolverError = 3,
}

impl Status {
    pub fn code(self) -> i32 {
        self as i32
    }

    /// The status of several runs: solver errors dominate failures.
    pub fn combine(self, other: Status) -> Status {
        self.max(other)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "absubdiff",
    version,
    about = "Atangana-Baleanu sub-diffusion toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one problem described by a JSON configuration.
    Solve {
        #[arg(short, long)]
        config: PathBuf,
    },
    /// Run the lemma or theorem checks.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Mittag-Leffler function spot checks.
    #[command(subcommand)]
    Mlf(MlfCommand),
    /// Apply a discrete fractional operator to sampled data.
    #[command(subcommand)]
    Fracops(FracopsCommand),
    /// Solve one configuration for several orders concurrently.
    Sweep {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Extremum checks on a random corpus of smooth functions.
    Lemmas(LemmaArgs),
    /// Maximum principles, uniqueness and stability on solver output.
    Theorems(TheoremArgs),
}

#[derive(Debug, Args)]
pub struct LemmaArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value_t = 4)]
    pub degree: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.5, 0.75])]
    pub alpha: Vec<f64>,
    /// CSV destination; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TheoremArgs {
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<TheoremId>,
    /// Use randomized instances drawn from this seed instead of the
    /// canonical suite.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Randomized instances per theorem.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = 40)]
    pub nx: usize,
    #[arg(long, default_value_t = 160)]
    pub nt: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// JSON destination; the report goes to stdout and the table to stderr
    /// when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum MlfCommand {
    /// Print E_{α,β}(z).
    Eval {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true)]
        z: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Operator {
    AbDerivative,
    AbDerivativeAlt,
    AbIntegral,
    RlIntegral,
    RlDerivative,
}

#[derive(Debug, Subcommand)]
pub enum FracopsCommand {
    /// Read `t,f` samples on a uniform grid from 0 and write `t,value`.
    Apply {
        #[arg(long, value_enum)]
        op: Operator,
        #[arg(long)]
        alpha: f64,
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

pub fn run(cli: Cli) -> Status {
    match cli.command {
        Command::Solve { config } => commands::solve(&config),
        Command::Verify(VerifyCommand::Lemmas(args)) => commands::verify_lemmas(&args),
        Command::Verify(VerifyCommand::Theorems(args)) => commands::verify_theorems(&args),
        Command::Mlf(MlfCommand::Eval { alpha, beta, z }) => commands::mlf_eval(alpha, beta, z),
        Command::Fracops(FracopsCommand::Apply {
            op,
            alpha,
            input,
            output,
        }) => commands::fracops_apply(op, alpha, &input, output.as_deref()),
        Command::Sweep { config, jobs } => commands::sweep(&config, jobs),
    }
}
