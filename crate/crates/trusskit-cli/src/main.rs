use std::process::ExitCode;

use clap::Parser;
use trusskit_cli::cli::{run, Cli};
use trusskit_cli::error::Kind;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(Kind::Input.exit_code()) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = std::panic::catch_unwind(|| run(cli));
    match outcome {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.kind.exit_code())
        }
        Err(_) => ExitCode::from(Kind::Internal.exit_code()),
    }
}
