//! Batch driver for the determinant experiments: parses flags and config
//! files, runs one subcommand, and writes CSV.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use config::Cli;
use error::{CliError, CliResult};

/// Runs a parsed invocation. The CSV is written even when every lambda was
/// rejected; that case is then reported as [`CliError::AllGapViolations`].
pub fn run(cli: &Cli) -> CliResult<()> {
    let cfg = cli.opts.resolve()?;
    let outcome = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::usage(format!("cannot start {n} threads: {e}")))?
            .install(|| commands::run_command(cli.command, &cfg))?,
        None => commands::run_command(cli.command, &cfg)?,
    };
    outcome.table.write(cfg.out.as_deref())?;
    if outcome.all_gap {
        return Err(CliError::AllGapViolations);
    }
    Ok(())
}
