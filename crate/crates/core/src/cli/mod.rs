//! `simulate <mode> --config <path> [--out <dir>] [--seed <u64>]`.
//!
//! Exit codes: 0 on success (including runs whose CM trajectory overflowed,
//! which is reported in the data), 2 for configuration errors, 3 for
//! numerical failures, 1 for I/O failures while writing results.

pub mod config;
pub mod output;
pub mod runs;

use std::path::{Path, PathBuf};

use clap::Parser;

use crate::error::{Error, Result};
pub use config::{Mode, RunConfig};
pub use output::OutputFile;
pub use runs::{execute, RunOutput};

/// Environment variable that sets the number of worker threads.
pub const THREADS_ENV: &str = "LINDBLAD_KIT_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "simulate", version, about = "CM vs symmetrized Markov generators for a QD/phonon two-level model")]
pub struct Cli {
    #[arg(value_enum)]
    pub mode: Mode,
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Directory for CSV and gnuplot files (created if missing).
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. } => EXIT_CONFIG,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_NUMERIC,
    }
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::config(THREADS_ENV, format!("expected a positive integer, got `{v}`"))),
        },
    }
}

/// Loads the config, runs it on a dedicated pool and returns the files.
pub fn run_config(cfg: &RunConfig) -> Result<RunOutput> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads_from_env()? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::Io(e.to_string()))?;
    pool.install(|| execute(cfg))
}

pub fn write_outputs(dir: &Path, files: &[OutputFile]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    files
        .iter()
        .map(|f| {
            let path = dir.join(&f.name);
            std::fs::write(&path, &f.contents)?;
            Ok(path)
        })
        .collect()
}

/// Runs the CLI and returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    let result = RunConfig::load(&cli.config, cli.mode, cli.seed)
        .and_then(|cfg| run_config(&cfg))
        .and_then(|out| write_outputs(&cli.out, &out.files).map(|paths| (paths, out.overflow)));
    match result {
        Ok((paths, overflow)) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            if overflow {
                println!("note: a trajectory exceeded the overflow threshold and was truncated");
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
