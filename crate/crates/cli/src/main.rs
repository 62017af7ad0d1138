use std::process::ExitCode;

use clap::Parser;
use qwalk_cli::{execute, Cli};

fn main() -> ExitCode {
    // Usage errors exit with 2 through clap.
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(done) => {
            print!("{}", done.rendered);
            ExitCode::from(if done.passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
