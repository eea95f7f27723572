//! Command-line front end for `advreg`: single solves, epsilon sweeps and the
//! example4 alpha study, each reproducible from the manifest it writes.

mod args;
mod commands;
mod manifest;

use std::ffi::OsString;

use clap::Parser;

pub use commands::{EXIT_SOLVER, EXIT_USAGE};
pub use manifest::{Run, RunManifest};

use args::{Cli, Command};

/// Parses `argv` (including the program name) and runs the command, returning
/// the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let out = commands::Printer { quiet: cli.quiet };
    let result = match &cli.command {
        Command::Solve(a) => commands::solve(a, out),
        Command::Sweep(a) => commands::sweep(a, out),
        Command::AlphaStudy(a) => commands::alpha(a, out),
        Command::Rerun(a) => commands::rerun(a, out),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {failure}");
            failure.code
        }
    }
}
