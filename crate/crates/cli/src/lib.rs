//! Command-line front end of `uqscore-core`: prediction file parsing, run
//! configuration and the `decompose`, `selective`, `ood`, `active` and
//! `verify` commands.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;

use std::io::Write;

pub use config::{resolve, Cli, Settings, Task};
pub use error::{CliError, Result};
pub use io::{parse_predictions, parse_predictions_str, serialize_predictions, PredictionRecord};

/// Resolves the configuration and runs the command inside a thread pool
/// capped by `--threads` / `UQSCORE_THREADS` (0 or unset: one per core).
pub fn run(cli: Cli, out: &mut (dyn Write + Send)) -> Result<()> {
    let settings = resolve(cli)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))?;
    pool.install(|| commands::run(&settings, out))
}
