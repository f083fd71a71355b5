//! `cobord`: genus tables, formal group laws, Landweber verdicts, Tor_1 and
//! Chern-Weil identity suites. Exit codes: 0 success, 1 a check failed,
//! 2 usage or input error.

mod args;
mod commands;
mod inputs;
mod report;

use std::fmt;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::Cli;

/// An error reported to the user with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<cobord_core::Error> for UsageError {
    fn from(e: cobord_core::Error) -> Self {
        UsageError(e.to_string())
    }
}

fn configure_threads() -> Result<(), UsageError> {
    let Ok(v) = std::env::var("COBORD_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| UsageError(format!("COBORD_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| UsageError(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = configure_threads().and_then(|_| commands::run(&cli.command, cli.seed));
    match outcome {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(report.render(cli.format()).as_bytes()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::from(if report.ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
