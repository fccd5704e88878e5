//! `factvc` command-line entry point.

mod cli;
mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use cli::{Cli, Command};

fn run(cli: &Cli) -> commands::Outcome {
    match &cli.command {
        Command::GenData(a) => commands::gen_data(a, cli.seed),
        Command::Finetune(a) => commands::finetune(a, cli.seed),
        Command::Score(a) => commands::score(a, cli.threads),
        Command::EvalCorr(a) => commands::eval_corr(a),
        Command::Agreement(a) => commands::agreement_cmd(a),
        Command::Rank(a) => commands::rank(a),
        Command::Stats(a) => commands::stats(a),
        Command::Serve(a) => commands::serve(a, cli.seed),
        Command::Foil(a) => commands::foil(a, cli.threads),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    env_logger::Builder::new().filter_level(cli.log_level).format_timestamp(None).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = e.source();
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(2)
        }
    }
}
