use std::process::ExitCode;

use clap::Parser;
use hiercon_cli::cli::{execute, init_threads, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match init_threads().and_then(|()| execute(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hiercon: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
