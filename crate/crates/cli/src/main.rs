mod args;
mod config;
mod error;
mod jobs;
mod manifest;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::CliError;
use jobs::Job;
use manifest::RunManifest;
use output::Format;

/// Worker threads for Monte-Carlo sweeps; results never depend on it.
const THREADS_VAR: &str = "QCLOCK_THREADS";

fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got {v:?}"))),
        },
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let (job, format, out) = match cli.command {
        Command::Replay { manifest } => {
            let recorded = RunManifest::load(&manifest)?;
            let out = cli.out.or_else(|| recorded.outputs.first().cloned());
            (recorded.job, cli.format.unwrap_or(recorded.format), out)
        }
        command => (Job::from_command(command)?, cli.format.unwrap_or(Format::Csv), cli.out),
    };

    let started = manifest::timestamp();
    let outcome = qclock::montecarlo::with_threads(threads_from_env()?, || job.run())??;
    let bytes = outcome.table.render(format)?;
    match &out {
        Some(path) => std::fs::write(path, &bytes)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }

    let manifest_path: Option<PathBuf> = cli.manifest.or_else(|| out.as_deref().map(manifest::default_path));
    if let Some(path) = manifest_path {
        RunManifest {
            seeds: job.seeds(),
            job,
            format,
            version: env!("CARGO_PKG_VERSION").to_string(),
            started,
            finished: manifest::timestamp(),
            outputs: out.into_iter().collect(),
        }
        .save(&path)?;
    }

    match outcome.degenerate {
        Some(reason) => Err(CliError::Degenerate(reason)),
        None => Ok(ExitCode::SUCCESS),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("qclock: {e}");
            e.exit_code()
        }
    }
}
