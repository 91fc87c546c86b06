use std::process::ExitCode;

use artkit::cli::{run, Cli, Outcome};
use artkit::ArtError;
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e @ ArtError::Argument(_)) => {
            eprintln!("artkit: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("artkit: {e}");
            ExitCode::from(3)
        }
    }
}
