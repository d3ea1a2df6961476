mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use gamedyn::Error;

use args::{Cli, Command};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn run(cli: Cli) -> gamedyn::Result<commands::Outcome> {
    match cli.command {
        Command::Classify { game, samples, output } => commands::cmd_classify(&game, samples, &output),
        Command::Solve { game, eps, starts, seed, output } => commands::cmd_solve(&game, eps, starts, seed, &output),
        Command::Simulate(args) => commands::cmd_simulate(&args),
        Command::Bifurcation { game, scheme, gamma, k, a, eps_min, eps_max, tol, output } => {
            commands::cmd_bifurcation(&game, scheme, gamma, k, a, (eps_min, eps_max), tol, &output)
        }
        Command::Reproduce { id, json, output } => commands::cmd_reproduce(&id, json, &output),
        Command::ListGames => Ok(commands::cmd_list_games()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => {
            let mut out = std::io::stdout().lock();
            // A closed pipe is not worth a panic.
            let _ = out.write_all(outcome.stdout.as_bytes());
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECK_FAILED)
            }
        }
        Err(e) => {
            eprintln!("gamedyn: {e}");
            match e {
                Error::Io(_) | Error::Diverged { .. } => ExitCode::from(EXIT_CHECK_FAILED),
                _ => ExitCode::from(EXIT_USAGE),
            }
        }
    }
}
