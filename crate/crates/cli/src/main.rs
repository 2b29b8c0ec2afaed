//! `lonely`: exact rational analysis of lonely-runner speed sets.
//!
//! Exit codes: 0 success, 1 input or usage error, 2 a mathematical claim
//! failed an exact check (falsification).

mod input;
mod render;
mod run;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Math(#[from] lonely_core::Error),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Math(e) if e.is_falsification() => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "lonely",
    version,
    about = "Exact rational analysis of lonely-runner speed sets",
    long_about = "Exact rational analysis of lonely-runner speed sets: pairwise \
close-time statistics with an independent oracle, gap-of-loneliness lower bounds \
with witness times, arc-intersection graph sweeps, and prime-power gap \
certificates. All rationals are read and written as reduced p/q strings."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    Pair(PairArgs),
    Bounds(BoundsArgs),
    Graph(GraphArgs),
    Prime(PrimeArgs),
    Verify(VerifyArgs),
}

/// One speed set, inline or from a file.
#[derive(Args)]
#[group(required = true, multiple = false)]
pub struct SpeedInput {
    /// Comma-separated speeds, e.g. 1,3,4
    #[arg(long, value_name = "LIST")]
    speeds: Option<String>,
    /// File with exactly one speed set (comma list or JSON array of arrays)
    #[arg(long, value_name = "PATH")]
    speeds_file: Option<PathBuf>,
}

/// Close-time statistics for every ordered pair of speeds.
#[derive(Args)]
pub struct PairArgs {
    #[command(flatten)]
    input: SpeedInput,
    /// Gap parameter as p/q in (0, 1/4]
    #[arg(long, value_name = "P/Q")]
    delta: String,
    /// Cross-check the closed form against the interval-union oracle
    #[arg(long)]
    check: bool,
    /// Add a column marking pairs whose joint probability is >= (1-ε)·4δ²
    #[arg(long, value_name = "P/Q")]
    epsilon: Option<String>,
    /// Add a column testing the ratio condition at γ = 1/M (slower speed second)
    #[arg(long, value_name = "P/Q")]
    gamma: Option<String>,
    /// Emit one JSON object instead of a table
    #[arg(long)]
    json: bool,
    /// Write CSV with columns v_i,v_j,gcd,eps_ij,eps_ji,f,error_term,probability
    /// plus oracle,matches under --check, eps_good under --epsilon and
    /// good_pair under --gamma
    #[arg(long, value_name = "PATH", conflicts_with = "json")]
    csv: Option<PathBuf>,
}

/// Lower bounds on the gap of loneliness, each with its threshold, plus a
/// witness time for the best threshold.
#[derive(Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    input: SpeedInput,
    /// Probe the union and tree bounds at this δ instead of their thresholds;
    /// also reports the moments E[X] and E[X²] at δ
    #[arg(long, value_name = "P/Q")]
    delta: Option<String>,
    /// With --delta, also build the greedy forest of ratio-good pairs for
    /// this ε'
    #[arg(long, value_name = "P/Q", requires = "delta")]
    epsilon: Option<String>,
    /// Emit one JSON object instead of text
    #[arg(long)]
    json: bool,
}

/// The moving graph of runner arcs: summary, sweep export, certificates.
#[derive(Args)]
pub struct GraphArgs {
    #[command(flatten)]
    input: SpeedInput,
    /// Write all constancy cells as CSV with columns
    /// t_lo,t_hi,Y,num_components,num_leaves (Y = number of edges)
    #[arg(long, value_name = "PATH")]
    sweep: Option<PathBuf>,
    /// Search the sweep for an isolated arc or four degree-one arcs
    #[arg(long)]
    certificate: bool,
    /// Check that the pairwise overlap measures sum to exactly n-1
    #[arg(long)]
    expected_edges: bool,
    /// Emit one JSON object instead of text
    #[arg(long)]
    json: bool,
}

/// Multiplier modulo p^{m+1}, p = 2n-3 prime, certifying a 1/p gap.
#[derive(Args)]
pub struct PrimeArgs {
    #[command(flatten)]
    input: SpeedInput,
    /// Emit one JSON object instead of text
    #[arg(long)]
    json: bool,
}

/// Batch verification: oracle agreement, witnessed thresholds, edge-measure
/// totals, and invisibility certificates for every set in a corpus.
#[derive(Args)]
#[command(group = clap::ArgGroup::new("source").required(true))]
pub struct VerifyArgs {
    /// Corpus file: one comma-separated speed set per line, or a JSON array
    /// of arrays
    #[arg(long, value_name = "PATH", group = "source")]
    corpus: Option<PathBuf>,
    /// Verify this many seeded-random speed sets instead of reading a file
    #[arg(long, value_name = "N", group = "source")]
    random: Option<usize>,
    /// Size of each random set
    #[arg(long, value_name = "K", default_value_t = 5)]
    set_size: usize,
    /// Speeds are drawn from [1, MAX]
    #[arg(long, value_name = "MAX", default_value_t = 50)]
    max_speed: u64,
    /// Seed for the random corpus
    #[arg(long, value_name = "INT", default_value_t = 0)]
    seed: u64,
    /// Pair checks run at this δ instead of min(1/4, 1/(2n)) per set
    #[arg(long, value_name = "P/Q")]
    delta: Option<String>,
    /// Emit one JSON object instead of per-set lines
    #[arg(long)]
    json: bool,
}

fn configure_threads() -> Result<()> {
    if let Ok(raw) = std::env::var("LONELY_THREADS") {
        let threads: usize = raw.trim().parse().ok().filter(|&k| k > 0).ok_or_else(|| {
            CliError::Input(format!(
                "LONELY_THREADS must be a positive integer, got {raw:?}"
            ))
        })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Input(format!("thread pool setup failed: {e}")))?;
    }
    Ok(())
}

fn main() {
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version go to stdout and exit 0; usage errors exit 1
            let code = i32::from(e.use_stderr());
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let outcome = match cli.command {
        Command::Pair(args) => run::pair(&args),
        Command::Bounds(args) => run::bounds(&args),
        Command::Graph(args) => run::graph(&args),
        Command::Prime(args) => run::prime(&args),
        Command::Verify(args) => run::verify(&args),
    };
    if let Err(e) = outcome {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
