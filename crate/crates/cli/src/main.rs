mod commands;
mod records;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mids_core::WeightVector;

/// Exact minimum independent dominating sets on marked graphs.
#[derive(Parser, Debug)]
#[command(name = "mids", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve an instance file.
    Solve(SolveArgs),
    /// Compare the exhaustive and maximal-independent-set oracles.
    Oracle(OracleArgs),
    /// Branching factors of the recurrence catalog.
    Analyze(AnalyzeArgs),
    /// Trace solver runs on the lower-bound family.
    Lbtrace(LbtraceArgs),
    /// Solve a generated random corpus and report per-instance work.
    Bench(BenchArgs),
    /// Write a generated instance to stdout.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Records,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    pub path: PathBuf,
    /// Re-validate the witness with the independent checker.
    #[arg(long)]
    pub check: bool,
    /// Check search invariants at every node.
    #[arg(long = "assert")]
    pub assertions: bool,
    /// Weights for the measure checked under `--assert`.
    #[arg(long, value_parser = parse_weights)]
    pub weights: Option<WeightVector>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    pub path: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[arg(long, value_parser = parse_weights)]
    pub weights: Option<WeightVector>,
    /// Also search the admissible region for the best weights.
    #[arg(long)]
    pub optimize: bool,
    /// Catalog file to use instead of the built-in one.
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct LbtraceArgs {
    #[arg(long, default_value_t = 5)]
    pub l_min: usize,
    #[arg(long, default_value_t = 14)]
    pub l_max: usize,
    /// Print one record per search node for this `l`.
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 40)]
    pub n: usize,
    #[arg(long, default_value_t = 0.2)]
    pub p: f64,
    /// Fraction of vertices to mark.
    #[arg(long, default_value_t = 0.0)]
    pub mark: f64,
    #[arg(long, default_value_t = 10)]
    pub count: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Subcommand, Debug)]
pub enum GenCommand {
    /// The layered lower-bound graph on `2l` vertices.
    LowerBound {
        #[arg(long)]
        l: usize,
    },
    /// `G(n, p)`, optionally with a fraction of vertices marked.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.0)]
        mark: f64,
    },
}

fn parse_weights(s: &str) -> Result<WeightVector, String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| "expected `w1,w2`".to_string())?;
    let parse = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
    WeightVector::new(parse(a)?, parse(b)?).map_err(|e| e.to_string())
}

/// Exit statuses shared by every subcommand.
pub mod exit {
    pub const FOUND: u8 = 0;
    pub const FAILURE: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const INFEASIBLE: u8 = 3;
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => commands::solve(&a),
        Command::Oracle(a) => commands::oracle(&a),
        Command::Analyze(a) => commands::analyze(&a),
        Command::Lbtrace(a) => commands::lbtrace(&a),
        Command::Bench(a) => commands::bench(&a),
        Command::Gen(g) => commands::generate(&g),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("mids: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
