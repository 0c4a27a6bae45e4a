// SPDX-License-Identifier: MIT OR Apache-2.0

//! `sargmax-lab`: runs the maximizer, distance and Monte Carlo operations from
//! TOML configs and flags, writes result files, and prints a one-line JSON
//! summary.

mod config;
mod run;

use std::process::ExitCode;

use clap::Parser;

use crate::run::{dispatch, CliError};

fn main() -> ExitCode {
    let cli = match config::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(line) => {
            println!("{line}");
            ExitCode::SUCCESS
        }
        Err(CliError::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Experiment(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
