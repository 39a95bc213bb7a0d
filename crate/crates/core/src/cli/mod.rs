//! Command-line front end. Each subcommand writes its outputs and an index
//! file into the output directory; `report` gathers them into a manifest.

pub mod commands;
pub mod config;
pub mod criteria;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::Context;
pub use config::Config;
pub use criteria::{evaluate, Criterion, Status};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "prandtl-lab", version, about = "Linearized Prandtl instability laboratory")]
pub struct Args {
    /// JSON configuration; defaults apply to missing fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; all cores when absent.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Recompute cached results and run past failed preconditions.
    #[arg(long, global = true)]
    pub force: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Solve the spectral condition for the flow and the check values of C.
    Spectral,
    /// Residual bound and growth sandwich over the ε ladder.
    Quasimode,
    /// High-frequency growth scan, control run, consistency and invariants.
    Scan,
    /// Steady von Mises march and round trip.
    Steady,
    /// Manifest and pass/fail summary of whatever has been run.
    Report,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERIC: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config { .. } => EXIT_CONFIG,
        _ => EXIT_NUMERIC,
    }
}

pub fn execute(args: &Args) -> Result<Vec<PathBuf>> {
    let config = match &args.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    config.validate()?;
    let ctx = Context::new(config, args.out.clone(), args.force)?;
    let run = || match args.command {
        Command::Spectral => commands::cmd_spectral(&ctx),
        Command::Quasimode => commands::cmd_quasimode(&ctx),
        Command::Scan => commands::cmd_scan(&ctx),
        Command::Steady => commands::cmd_steady(&ctx),
        Command::Report => commands::cmd_report(&ctx),
    };
    match args.workers {
        Some(0) => Err(Error::config("--workers", "must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::config("--workers", e.to_string()))?
            .install(run),
        None => run(),
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&args) {
        Ok(files) => {
            for f in files {
                eprintln!("wrote {}", f.display());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
