//! Library surface of the simulator CLI: configuration, commands, and
//! output writing, reused by the binary and by the acceptance suite.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;
use std::time::Instant;

use anyhow::Result;

use config::ResolvedRun;
use output::{write_run, OutputFile};

/// Execute one command inside a rayon pool of the configured size
/// (0 = automatic) and write its outputs plus the manifest.
pub fn execute(
    command: &str,
    run: &ResolvedRun,
    runner: impl FnOnce(&ResolvedRun) -> Result<Vec<OutputFile>> + Send,
) -> Result<PathBuf> {
    let started = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(run.threads)
        .build()
        .map_err(|e| anyhow::anyhow!("thread pool: {e}"))?;
    let outputs = pool.install(|| runner(run))?;
    let runtime = started.elapsed().as_secs_f64();
    write_run(&run.out_dir, command, &run.echo, &outputs, runtime)
}
