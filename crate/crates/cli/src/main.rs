//! `kmittag` command-line tool.
//!
//! Exit status: 0 success, 2 invalid input, 3 a series failed to converge,
//! 4 a verification report failed its gate, 1 I/O failure.

mod args;
mod commands;
mod error;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::CliResult;

fn run(cli: Cli) -> CliResult<()> {
    match &cli.command {
        Command::EvalMl(a) => commands::eval_ml(a),
        Command::EvalKml(a) => commands::eval_kml(a),
        Command::Solve(a) => commands::run_solve(a),
        Command::Verify(a) => commands::run_verify(a),
        Command::Table(a) => commands::run_table(a),
    }
}

fn main() -> ExitCode {
    let argv = match args::expand_config(std::env::args_os().collect()) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let cli = Cli::try_parse_from(argv).unwrap_or_else(|e| e.exit());
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
