use std::process::ExitCode;

use clap::Parser;
use pcontrol::cli::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match pcontrol::cli::execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
