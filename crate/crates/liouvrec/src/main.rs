//! Command-line entry point.
//!
//! Verbs:
//! * `run <config>`    — execute the full pipeline for a config file;
//! * `oracle <config>` — write the brute-force reference data;
//! * `report <dir>`    — aggregate run outputs into figure CSVs.
//!
//! Exit codes: `0` success, `2` configuration or input error, `3` a
//! recursion hit a negative measured norm (partial results are written).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use liouvrec::config::RunConfig;
use liouvrec::pipeline::{execute_oracle, execute_run};
use liouvrec::report::execute_report;
use liouvrec::Error;

#[derive(Parser)]
#[command(
    name = "liouvrec",
    version,
    about = "Liouvillian recursion for lattice Green's functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the pipeline described by a config file.
    Run {
        /// Path to the TOML configuration.
        config: PathBuf,
        /// Override single keys, e.g. `--set backend.shots=4000`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Write the exact-diagonalization reference data for a config.
    Oracle {
        /// Path to the TOML configuration.
        config: PathBuf,
        /// Override single keys, e.g. `--set model.sites=2`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Aggregate run outputs under a directory into figure CSVs and a
    /// pass/fail summary.
    Report {
        /// A run output directory, or a directory of run outputs.
        dir: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) => ExitCode::from(2),
                Error::NegativeNorm { .. } => ExitCode::from(3),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn dispatch(cli: Cli) -> liouvrec::Result<ExitCode> {
    match cli.command {
        Command::Run { config, set } => {
            let config = RunConfig::load(&config, &set)?;
            let artifacts = execute_run(&config)?;
            println!(
                "wrote {} files to {}",
                artifacts.manifest.files.len() + 1,
                artifacts.output_dir.display()
            );
            if artifacts.aborted() {
                for err in &artifacts.manifest.errors {
                    eprintln!("aborted: {err}");
                }
                eprintln!("partial results written");
                Ok(ExitCode::from(3))
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }
        Command::Oracle { config, set } => {
            let config = RunConfig::load(&config, &set)?;
            let path = execute_oracle(&config)?;
            println!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Report { dir } => {
            let outcome = execute_report(&dir)?;
            println!(
                "aggregated {} runs into {} ({} failing checks)",
                outcome.runs,
                outcome.report_dir.display(),
                outcome.failures
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}
