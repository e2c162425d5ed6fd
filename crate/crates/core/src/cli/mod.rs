//! Command-line front end: configuration, commands, fitting and output.

pub mod commands;
pub mod config;
pub mod fit;
pub mod output;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use config::RunConfig;

/// Environment variable capping the sweep thread pool.
pub const THREADS_VAR: &str = "TUNNELKIT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "tunnelkit", version, about = "Ground-doublet tunnel splittings of 1-D double wells")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, clap::Args)]
pub struct Io {
    /// JSON run configuration.
    pub config: PathBuf,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Landmarks, action, all splitting routes and optional oracle spectrum.
    Analyze(Io),
    /// Bias sweep with a quadratic fit of ln delta.
    Sweep(Io),
    /// Finite-difference reference spectrum.
    Oracle(Io),
    /// Splitting of every method against the oracle.
    Compare(Io),
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(format!("{THREADS_VAR} must be a positive integer, got \"{v}\""))),
        },
    }
}

fn emit(io: &Io, text: &str) -> Result<()> {
    match &io.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Sidecar path for the fit summary of a CSV sweep written to a file.
pub fn fit_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".fit.json");
    out.with_file_name(name)
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Analyze(io) => {
            let report = commands::analyze(&RunConfig::load(&io.config)?)?;
            match io.format.unwrap_or(Format::Json) {
                Format::Json => emit(io, &output::json(&report)?),
                Format::Csv => emit(io, &output::rows_csv(&[report.row()])?),
            }
        }
        Command::Sweep(io) => {
            let cfg = RunConfig::load(&io.config)?;
            let report = match threads_from_env()? {
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::Config(format!("cannot start {n} threads: {e}")))?
                    .install(|| commands::sweep(&cfg))?,
                None => commands::sweep(&cfg)?,
            };
            match io.format.unwrap_or(Format::Csv) {
                Format::Json => emit(io, &output::json(&report)?),
                Format::Csv => {
                    emit(io, &output::rows_csv(&report.rows)?)?;
                    let summary = serde_json::json!({
                        "fit": report.fit,
                        "c1_analytic": report.c1_analytic,
                        "c1_relative_error": report.c1_relative_error,
                        "c1_quantum_units": report.c1_quantum_units,
                        "barrier_quanta": report.barrier_quanta,
                        "warnings": report.warnings,
                    });
                    let text = output::json(&summary)?;
                    match &io.out {
                        Some(out) => std::fs::write(fit_path(out), text)
                            .map_err(|e| Error::Config(format!("cannot write fit summary: {e}"))),
                        None => {
                            eprint!("{text}");
                            Ok(())
                        }
                    }
                }
            }
        }
        Command::Oracle(io) => {
            let report = commands::oracle(&RunConfig::load(&io.config)?)?;
            match io.format.unwrap_or(Format::Json) {
                Format::Json => emit(io, &output::json(&report)?),
                Format::Csv => emit(io, &output::oracle_csv(&report)?),
            }
        }
        Command::Compare(io) => {
            let report = commands::compare(&RunConfig::load(&io.config)?)?;
            match io.format.unwrap_or(Format::Csv) {
                Format::Json => emit(io, &output::json(&report)?),
                Format::Csv => emit(io, &output::compare_csv(&report)?),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn parses_all_options() {
        let cli = Cli::try_parse_from(["tunnelkit", "sweep", "c.json", "--out", "o.csv", "--format", "json"]).unwrap();
        match cli.command {
            Command::Sweep(io) => {
                assert_eq!(io.format, Some(Format::Json));
                assert_eq!(io.out.unwrap(), PathBuf::from("o.csv"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fit_sidecar_name() {
        assert_eq!(fit_path(Path::new("/tmp/run.csv")), PathBuf::from("/tmp/run.csv.fit.json"));
    }
}
