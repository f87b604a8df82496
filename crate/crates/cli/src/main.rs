use std::io::IsTerminal;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use effbench_core::{Error, ErrorClass};

mod commands;
mod output;

use output::Output;

/// Dataset effectiveness and correlation-controlled synthetic benchmarks.
#[derive(Debug, Parser)]
#[command(name = "effbench", version, about)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Master seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads; defaults to the number of cores. Results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Force JSON output (default when stdout is not a terminal).
    #[arg(long, global = true, conflicts_with = "table")]
    json: bool,

    /// Force human-readable tables (default on a terminal).
    #[arg(long, global = true)]
    table: bool,

    /// Also write x/y columns for external plotting to this CSV file.
    #[arg(long, global = true, value_name = "FILE")]
    plot_data: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a sweep of Syn-Degree or Syn-CC datasets.
    Generate(commands::generate::GenerateArgs),
    /// Pearson correlation between each graph property and the labels.
    Corr(commands::corr::CorrArgs),
    /// Effectiveness from a file of result records.
    Effectiveness(commands::effectiveness::EffectivenessArgs),
    /// Cross-validated gap measurement on one dataset.
    Evaluate(commands::evaluate::EvaluateArgs),
    /// Predict effectiveness from dataset statistics over a directory of datasets.
    Regress(commands::regress::RegressArgs),
}

fn exit_code(e: &Error) -> u8 {
    match e.class() {
        ErrorClass::Usage => 2,
        ErrorClass::Data => 3,
        ErrorClass::Internal => 4,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let g = cli.global;

    if let Some(jobs) = g.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(4);
        }
    }
    eprintln!("seed: {}", g.seed);

    let json = g.json || (!g.table && !std::io::stdout().is_terminal());
    let out = Output::new(json, g.plot_data);
    let result = match cli.command {
        Command::Generate(a) => commands::generate::run(a, g.seed, &out),
        Command::Corr(a) => commands::corr::run(a, g.seed, &out),
        Command::Effectiveness(a) => commands::effectiveness::run(a, &out),
        Command::Evaluate(a) => commands::evaluate::run(a, g.seed, &out),
        Command::Regress(a) => commands::regress::run(a, g.seed, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
