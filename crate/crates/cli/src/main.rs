//! Command-line front end for the relaxation-and-rounding toolkit: sample
//! datasets, train proxy models, solve single instances, and run benchmark
//! suites.
//!
//! Exit codes: 0 success (and, for `solve`, a feasible solution); 1 usage or
//! I/O failure; 2 infeasible; 3 a rounding-guarantee violation while the
//! guarantee was applicable, which signals an implementation bug rather than a
//! property of the instance.

mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "relaxround",
    version,
    about = "Relax, optimize, round: combinatorial problems via concave relaxations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a labeled dataset from a problem family and write it to a directory
    Dataset(commands::dataset::DatasetArgs),
    /// Train a proxy model on a sampled dataset and write a checkpoint
    Train(commands::train::TrainArgs),
    /// Run the relax-optimize-round pipeline on one instance
    Solve(commands::solve::SolveArgs),
    /// Run a benchmark suite and write CSV/JSON reports
    Bench(commands::bench::BenchArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests arrive as parse "errors" but are not.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0u8,
                _ => 1u8,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Dataset(args) => commands::dataset::run(args),
        Command::Train(args) => commands::train::run(args),
        Command::Solve(args) => commands::solve::run(args),
        Command::Bench(args) => commands::bench::run(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
