//! `cvnet` command-line tool.

mod args;
mod commands;
mod error;
mod network;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::CliError;

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.common.threads {
        if threads == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    match &cli.command {
        Command::Gen(a) => commands::gen(a, &cli.common),
        Command::Cost(a) => commands::cost(a, &cli.common),
        Command::Route(a) => commands::route(a, &cli.common),
        Command::Survey(a) => commands::survey_cmd(a, &cli.common),
        Command::Sweep(a) => commands::sweep(a, &cli.common),
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors and 0 for --help/--version
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cvnet {}: error: {e}", cli.command.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
