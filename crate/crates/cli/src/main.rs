use std::process::ExitCode;

use clap::Parser;

mod cli;
mod commands;
mod output;

use cli::{Cli, Command};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Analyze(args) => commands::analyze(args, &cli.format),
        Command::Simulate(args) => commands::simulate(args, &cli.format),
        Command::Sweep(args) => commands::sweep(args, &cli.format),
        Command::States(args) => commands::states(args, &cli.format),
        Command::Bianchi(args) => commands::bianchi(args, &cli.format),
        Command::GammaCurve(args) => commands::gamma_curve(args, &cli.format),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 1 for bad input, 2 for numerical failure.
fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<wlan_ctmc::Error>() {
        Some(inner) if !inner.is_input_error() => 2,
        _ => 1,
    }
}
