//! `nervecov`: coverage probabilities of metric graphs by random ball covers.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nervecov::Error;

#[derive(Parser, Debug)]
#[command(name = "nervecov", version, about = "Coverage probabilities of metric graphs from the random nerve")]
pub struct Cli {
    /// Write the CSV here instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    /// Write "omitted" for the wall time so reruns are byte-identical.
    #[arg(long, global = true)]
    pub no_wall_time: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the labeled complexes on n vertices, or a coefficient table.
    Enumerate(EnumerateArgs),
    /// Law of the Euler characteristic by the direct and moment paths.
    ChiDist(ChiDistArgs),
    /// Complete-coverage probability by the selected methods.
    Coverage(CoverageArgs),
    /// Stevens' formula and the gap law over a grid of arc lengths.
    Stevens(StevensArgs),
    /// Empirical law of (nerve, boundary nerve) from sampled covers.
    Mc(McArgs),
    /// Azuma upper bound on the coverage probability.
    Bound(BoundArgs),
    /// Run the acceptance suite.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub n: usize,
    /// Dump coefficients of `chi` or `f<d>` instead of the family.
    #[arg(long)]
    pub coefficients: Option<String>,
    /// Power k for the coefficient table.
    #[arg(long, default_value_t = 1)]
    pub k: u32,
}

#[derive(Args, Debug, Clone)]
pub struct GraphArgs {
    /// Graph file, or one of the built-ins `circle`, `interval`, `theta` (unit lengths).
    #[arg(long)]
    pub graph: String,
    /// Comma-separated boundary vertex ids (each must have degree 1).
    #[arg(long, value_delimiter = ',')]
    pub boundary_override: Option<Vec<String>>,
}

#[derive(Args, Debug, Clone)]
pub struct SamplingArgs {
    /// Number of samples; scientific notation such as 1e6 is accepted.
    #[arg(long, value_parser = commands::parse_count, default_value = "100000")]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = "NERVECOV_WORKERS", default_value_t = 1)]
    pub workers: usize,
    /// Keep bad covers for the direct frequency instead of redrawing them.
    #[arg(long)]
    pub keep: bool,
    /// Permit radii of a quarter of the girth or more; goodness is then checked per sample.
    #[arg(long)]
    pub allow_large_eps: bool,
    /// Compare nerve and Rips complex on every sample below the Rips threshold.
    #[arg(long)]
    pub rips_check: bool,
    /// Edge weights for the mixture sampler (default: uniform by length).
    #[arg(long, value_delimiter = ',')]
    pub edge_weights: Option<Vec<f64>>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    Atomic,
    Cumulative,
}

#[derive(Args, Debug)]
pub struct ChiDistArgs {
    #[arg(long)]
    pub n: usize,
    /// Law file with columns `subcomplex,value`.
    #[arg(long, conflicts_with = "graph")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormArg::Atomic)]
    pub form: FormArg,
    /// Sample the law on this graph instead of reading it.
    #[arg(long)]
    pub graph: Option<String>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Range `lo:hi`; defaults to `[χ(X), n]` or the support.
    #[arg(long)]
    pub range: Option<String>,
    #[command(flatten)]
    pub sampling: SamplingArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    ExactFromP,
    Mc,
    Oracle,
    All,
}

#[derive(Args, Debug)]
pub struct CoverageArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, value_enum, default_value_t = Mode::All)]
    pub mode: Mode,
    /// Law of the nerve (`subcomplex,value`) for the exact pipeline.
    #[arg(long)]
    pub p_vector: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormArg::Cumulative)]
    pub form: FormArg,
    /// Atomic pair law (`subcomplex,boundary,probability`) for graphs with boundary.
    #[arg(long)]
    pub pairs: Option<PathBuf>,
    /// Also write the χ law `(value, probability)` of each pipeline here.
    #[arg(long)]
    pub distribution_output: Option<PathBuf>,
    #[command(flatten)]
    pub sampling: SamplingArgs,
}

#[derive(Args, Debug)]
pub struct StevensArgs {
    #[arg(long)]
    pub n: usize,
    /// Grid `start:stop:step`, inclusive.
    #[arg(long, conflicts_with = "alpha")]
    pub alpha_grid: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Args, Debug)]
pub struct McArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub eps: f64,
    /// Write the first sampled realization's ball intervals here.
    #[arg(long)]
    pub dump_realization: Option<PathBuf>,
    #[command(flatten)]
    pub sampling: SamplingArgs,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long)]
    pub n: usize,
    /// Mean of the relative Euler characteristic; estimated by sampling if absent.
    #[arg(long)]
    pub mean: Option<f64>,
    #[arg(long, required_unless_present = "mean")]
    pub eps: Option<f64>,
    #[command(flatten)]
    pub sampling: SamplingArgs,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 20_240_601)]
    pub seed: u64,
    #[arg(long, env = "NERVECOV_WORKERS", default_value_t = 1)]
    pub workers: usize,
}

/// Exit status for an error: 1 configuration, 2 numerical consistency, 3 I/O.
fn classify(e: &Error) -> (&'static str, u8) {
    match e {
        Error::Parameter(_) | Error::Parse { .. } | Error::Inconsistent(_) => ("config", 1),
        Error::Consistency { .. } | Error::Overflow(_) => ("numerical", 2),
        Error::Io(_) => ("io", 3),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let (kind, code) = classify(&e);
            let message = e.to_string().replace('"', "'");
            eprintln!("error,{kind},{code},\"{message}\"");
            ExitCode::from(code)
        }
    }
}
