//! `mnsdp`: generate MNSDP instances, solve them and inspect solutions.
//!
//! Exit codes: 0 success, 2 usage or parameter error, 3 infeasible or
//! unsatisfiable instance, 4 I/O or file-format error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mnsdp_core::{Error, Operator};

mod commands;

#[derive(Debug, Parser)]
#[command(
    name = "mnsdp",
    version,
    about = "Multi-microgrid network structure design solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a benchmark instance.
    Gen(GenArgs),
    /// Run the evolutionary solver on an instance.
    Solve(SolveArgs),
    /// Evaluate a topology against an instance.
    Eval(EvalArgs),
    /// Render a topology as a Graphviz DOT file.
    ExportDot(ExportDotArgs),
    /// Build one heuristic solution (for inspection).
    Init(InitArgs),
    /// Repeat the solver over consecutive seeds and summarise the results.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    nodes: usize,
    /// Generation/consumption ratio, > 1.
    #[arg(long)]
    ratio: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fixed class counts, e.g. `30,30,40`.
    #[arg(long, value_parser = parse_composition)]
    composition: Option<[usize; 3]>,
    /// Instance name (defaults to MNSDP-<n>-r<ratio>-s<seed>).
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Clone)]
struct SolverArgs {
    #[arg(long, default_value = "matrix-de", value_parser = parse_operator)]
    algo: Operator,
    /// Population size (default 20·n).
    #[arg(long)]
    pop: Option<usize>,
    /// Evaluation budget (default n·pop).
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    f: Option<f64>,
    #[arg(long)]
    cr: Option<f64>,
    /// Per-row selection probability (default 1/n).
    #[arg(long)]
    row_rate: Option<f64>,
    #[arg(long)]
    batch: Option<usize>,
    /// Stagnant generations before the standstill mutation.
    #[arg(long)]
    standstill: Option<usize>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    solver: SolverArgs,
    /// Where to write the best topology.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to write the convergence CSV.
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    topology: PathBuf,
}

#[derive(Debug, Args)]
struct ExportDotArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    topology: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct InitArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    instance: PathBuf,
    /// First seed; run `r` uses `seed + r`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    runs: usize,
    #[command(flatten)]
    solver: SolverArgs,
}

fn parse_composition(s: &str) -> Result<[usize; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err("expected three comma-separated counts n1,n2,n3".into());
    }
    let mut out = [0; 3];
    for (slot, p) in out.iter_mut().zip(parts) {
        *slot = p.parse().map_err(|e| format!("bad count \"{p}\": {e}"))?;
    }
    Ok(out)
}

fn parse_operator(s: &str) -> Result<Operator, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parameter(_) => 2,
        Error::Unsatisfiable(_) => 3,
        Error::Format { .. } | Error::Mismatch(_) | Error::Io(_) => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Solve(a) => commands::solve(a),
        Command::Eval(a) => commands::eval(a),
        Command::ExportDot(a) => commands::export_dot(a),
        Command::Init(a) => commands::init(a),
        Command::Bench(a) => commands::bench(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
