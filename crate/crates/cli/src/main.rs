//! `polyslice`: section volumes, kernel tables, inequality suites and direction
//! searches as deterministic CSV or JSON.
//!
//! Exit codes: 0 success, 1 failed check or I/O error, 2 usage error, 3 numerical
//! non-convergence. Diagnostics go to standard error only.

mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;
use polyslice::Error;

use commands::{Command, Common};

#[derive(Debug, Parser)]
#[command(
    name = "polyslice",
    version,
    about = "Complex l_p ball section volumes"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NONCONVERGENCE: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonConvergence(_) => EXIT_NONCONVERGENCE,
        Error::Domain { .. }
        | Error::Dimension(_)
        | Error::InvalidSpec(_)
        | Error::Normalization(_) => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match commands::run(&cli.command, &cli.common) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("polyslice: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let written = outcome
        .report
        .render(cli.common.format)
        .and_then(|bytes| output::emit(&bytes, cli.common.output_path.as_deref()));
    if let Err(e) = written {
        eprintln!("polyslice: cannot write output: {e}");
        return ExitCode::from(EXIT_FAILED);
    }
    if outcome.failed {
        eprintln!("polyslice: at least one required check failed");
        return ExitCode::from(EXIT_FAILED);
    }
    ExitCode::SUCCESS
}
