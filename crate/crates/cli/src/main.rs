use std::process::ExitCode;

use clap::Parser;
use congrulab_cli::{run, Cli, EXIT_INTERNAL};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.code as u8);
        }
    };
    let body = outcome.report.render(cli.format);
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &body),
        None => {
            print!("{body}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(EXIT_INTERNAL as u8);
    }
    for note in &outcome.notes {
        eprintln!("{note}");
    }
    ExitCode::from(outcome.exit_code() as u8)
}
