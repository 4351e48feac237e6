use std::io;
use std::process::ExitCode;

use clap::Parser;
use uqscore_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli, &mut io::stdout()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("uqscore: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
