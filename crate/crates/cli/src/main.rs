//! `gd`: command-line front end for `gd-core`.
//!
//! Exit codes: 0 when the checked property holds, 2 when it fails, 1 on
//! usage, input or numerical errors. `GD_THREADS` caps the worker count.

mod args;
mod builtin;
mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use gd_core::parallel::Exec;

#[derive(Debug)]
pub struct CliError(String);

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError(msg.into())
    }

    /// Prefixes IO failures with the offending path; parse errors carry it already.
    pub fn at(path: &std::path::Path, e: gd_core::Error) -> Self {
        match e {
            gd_core::Error::Io(io) => CliError(format!("{}: {io}", path.display())),
            other => other.into(),
        }
    }
}

impl From<gd_core::Error> for CliError {
    fn from(e: gd_core::Error) -> Self {
        CliError(e.to_string())
    }
}

fn executor() -> Result<Exec, CliError> {
    let Ok(raw) = std::env::var("GD_THREADS") else {
        return Ok(Exec::Parallel);
    };
    let threads: usize = raw.trim().parse().ok().filter(|t| *t >= 1).ok_or_else(|| {
        CliError::usage(format!(
            "GD_THREADS must be a positive integer, got `{raw}`"
        ))
    })?;
    if threads == 1 {
        return Ok(Exec::Sequential);
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::usage(format!("thread pool: {e}")))?;
    Ok(Exec::Parallel)
}

fn main() -> ExitCode {
    let cli = match args::Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = executor()
        .and_then(|exec| commands::run(cli.command, exec))
        .and_then(|outcome| output::emit(&outcome).map(|_| outcome.pass));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(CliError(msg)) => {
            eprintln!("gd: error: {msg}");
            ExitCode::from(1)
        }
    }
}
