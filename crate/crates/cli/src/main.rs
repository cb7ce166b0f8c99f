//! `obcs`: construct and verify robust union-free families, simulate one-bit
//! measurements, recover signals, evaluate lower bounds and run sweeps.
//!
//! Exit codes: 0 on success, 1 when the requested object does not exist or a
//! check fails (for example a family that does not verify), 2 on usage errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use obcs::recovery::Estimator;
use obcs::sensing::ValueModel;
use obcs::Fraction;

#[derive(Debug, Parser)]
#[command(name = "obcs", version, about = "Universal one-bit compressive sensing toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a set family and write it as JSON.
    #[command(subcommand)]
    Construct(Construct),
    /// Check a family for the robust (or plain) union-free property.
    Verify(VerifyArgs),
    /// Compute the sign pattern of a signal under a family's matrix.
    Measure(MeasureArgs),
    /// Recover a support or a direction from sign measurements.
    #[command(subcommand)]
    Recover(Recover),
    /// Evaluate measurement lower bounds.
    #[command(subcommand)]
    Bounds(Bounds),
    /// Build two signals with different supports and identical sign patterns.
    Adversary(AdversaryArgs),
    /// Run a parameter sweep described by a JSON config.
    Experiment(ExperimentArgs),
    /// Aggregate a sweep CSV per grid point.
    Summarize(SummarizeArgs),
}

#[derive(Debug, Subcommand)]
enum Construct {
    /// Sample uniform random sets until the family verifies.
    Random(RandomArgs),
    /// Design from a Reed-Solomon code over a prime field.
    Rs(RsArgs),
}

#[derive(Debug, Args)]
struct RandomArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value = "1/2")]
    alpha: Fraction,
    #[arg(long, default_value_t = 100.0)]
    c_m: f64,
    #[arg(long, default_value_t = 10.0)]
    c_d: f64,
    /// Fixed ground-set size (overrides --c-m).
    #[arg(long)]
    m: Option<usize>,
    /// Fixed set size (overrides --c-d).
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, default_value_t = 10)]
    retries: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the family here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RsArgs {
    /// Prime field size.
    #[arg(long)]
    q: u64,
    /// Polynomials have degree below this bound.
    #[arg(long)]
    deg: usize,
    /// Number of evaluation points, which is also the set size.
    #[arg(long)]
    d: usize,
    /// Report parameters lifted to this arity.
    #[arg(long)]
    lift_k: Option<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    family: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value = "1/2")]
    alpha: Fraction,
    /// Plain union-free check; sets may differ in size and alpha is ignored.
    #[arg(long, conflicts_with = "certificate")]
    uff: bool,
    /// Use the pairwise-intersection certificate instead of exhaustive search.
    #[arg(long)]
    certificate: bool,
    /// Also print size and intersection statistics.
    #[arg(long)]
    stats: bool,
}

#[derive(Debug, Args)]
struct MeasureArgs {
    #[arg(long)]
    family: PathBuf,
    /// Signal JSON `{"dim": n, "entries": [[index, value], ...]}`.
    #[arg(long, conflicts_with = "k")]
    signal: Option<PathBuf>,
    /// Generate a random signal with this many nonzeros instead.
    #[arg(long, required_unless_present = "signal")]
    k: Option<usize>,
    #[arg(long, default_value = "random-signs")]
    model: ValueModel,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Values with magnitude at most tau are read as zero.
    #[arg(long, default_value_t = 0.0)]
    tau: f64,
}

#[derive(Debug, Subcommand)]
enum Recover {
    /// Majority-vote support recovery from a sign pattern.
    Support(RecoverSupportArgs),
    /// Simulate two-stage recovery of a signal's direction.
    Approx(RecoverApproxArgs),
}

#[derive(Debug, Args)]
struct RecoverSupportArgs {
    #[arg(long)]
    family: PathBuf,
    /// Pattern JSON `{"values": [...]}`, or the output of `obcs measure`.
    #[arg(long)]
    pattern: PathBuf,
}

#[derive(Debug, Args)]
struct RecoverApproxArgs {
    #[arg(long)]
    family: PathBuf,
    #[arg(long)]
    signal: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long)]
    m2: usize,
    #[arg(long, default_value = "linear")]
    estimator: Estimator,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Bounds {
    /// Largest possible union-free family over m elements.
    Furedi {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        k: u64,
    },
    /// Fewest measurements for support recovery of n coordinates.
    MinM {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
    },
    /// Regions cut by m hyperplanes in k dimensions.
    Regions {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        k: u64,
    },
    /// Size of an epsilon-separated set on the sphere.
    Cover {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.5)]
        c: f64,
    },
    /// Fewest measurements for epsilon-approximate recovery in k dimensions.
    ApproxLb {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.5)]
        c: f64,
    },
    /// Packing count over supports and the implied measurement bound.
    Gv {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        epsilon: f64,
    },
}

#[derive(Debug, Args)]
struct AdversaryArgs {
    /// Matrix JSON `{"m": .., "n": .., "rows": [[..], ..]}`.
    #[arg(long, conflicts_with = "planted", required_unless_present = "planted")]
    matrix: Option<PathBuf>,
    /// Use a random matrix with a planted covered column, given as `m,n`.
    #[arg(long, value_parser = parse_pair)]
    planted: Option<(usize, usize)>,
    /// Planted matrices get entries of both signs.
    #[arg(long, requires = "planted")]
    signed: bool,
    #[arg(long)]
    k: usize,
    /// Use the real-valued construction even for a nonnegative matrix.
    #[arg(long)]
    real: bool,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Keep complete grid points already in the output file.
    #[arg(long)]
    resume: bool,
}

#[derive(Debug, Args)]
struct SummarizeArgs {
    input: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `m,n`, got `{s}`"))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    Ok((parse(a)?, parse(b)?))
}

/// Failure classes, mapped onto exit codes.
#[derive(Debug)]
pub enum CliError {
    /// The input is well formed but the answer is negative (exit 1).
    Domain(String),
    /// Bad input, bad file, or an impossible request (exit 2).
    Usage(String),
}

impl CliError {
    pub fn domain(e: impl std::fmt::Display) -> Self {
        CliError::Domain(e.to_string())
    }

    pub fn usage(e: impl std::fmt::Display) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Construct(Construct::Random(args)) => commands::construct_random(args),
        Command::Construct(Construct::Rs(args)) => commands::construct_rs(args),
        Command::Verify(args) => commands::verify(args),
        Command::Measure(args) => commands::measure(args),
        Command::Recover(Recover::Support(args)) => commands::recover_support(args),
        Command::Recover(Recover::Approx(args)) => commands::recover_approx(args),
        Command::Bounds(bounds) => commands::bounds(bounds),
        Command::Adversary(args) => commands::adversary(args),
        Command::Experiment(args) => commands::experiment(args),
        Command::Summarize(args) => commands::summarize(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Domain(msg)) => {
            eprintln!("obcs: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("obcs: {msg}");
            ExitCode::from(2)
        }
    }
}
