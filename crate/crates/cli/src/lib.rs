//! `cpg`: command-line front end for the Casimir-Polder atom/graphene engine.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or configuration
//! error, 3 numerical failure, 4 I/O error.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use cpg_verify::Suite;

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use error::{CliError, CliResult};
use output::Format;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "CPG_THREADS";

#[derive(Debug, Parser)]
#[command(name = "cpg", version, about = "Casimir-Polder free energy and entropy of an atom above graphene")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Free-energy breakdown at one temperature, as a JSON record.
    #[command(allow_negative_numbers = true)]
    Energy {
        config: PathBuf,
        /// Temperature in kelvin.
        #[arg(long)]
        temp: f64,
    },
    /// Free energy and entropy over the configured temperature sweep.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Runs acceptance checks; exits 1 if any fails.
    Verify {
        /// nernst, asymptotics, oracles or all.
        #[arg(long, default_value = "all")]
        suite: Suite,
    },
    /// Fitted low-temperature laws against their predicted coefficients.
    Asymptotics { config: PathBuf },
}

/// Worker count from `CPG_THREADS`, if set.
pub fn threads_from_env() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
        Err(e) => Err(CliError::Usage(format!("{THREADS_ENV}: {e}"))),
    }
}

/// Sizes the global worker pool. Without the `parallel` feature everything
/// runs on the calling thread and the value is only validated.
pub fn configure_threads(threads: Option<usize>) -> CliResult<()> {
    #[cfg(feature = "parallel")]
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {n} worker threads: {e}")))?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

/// Executes one parsed command, writing results to `out`.
pub fn run(command: Command, mut out: impl Write) -> CliResult<()> {
    let stdout_err = |e| CliError::io("<stdout>", e);
    match command {
        Command::Energy { config, temp } => {
            let cfg = config::load(&config)?;
            let (record, warnings) = commands::energy(&cfg, temp)?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            let line = serde_json::to_string(&record).expect("record serializes");
            writeln!(out, "{line}").map_err(stdout_err)?;
        }
        Command::Sweep { config, out: path, format } => {
            let cfg = config::load(&config)?;
            let n = commands::sweep(&cfg, &path, format)?;
            eprintln!("wrote {n} rows to {}", path.display());
        }
        Command::Verify { suite } => {
            commands::verify(suite, &mut out)?;
        }
        Command::Asymptotics { config } => {
            let cfg = config::load(&config)?;
            let rows = commands::asymptotics(&cfg)?;
            write!(out, "{}", commands::format_asymptotics(&rows)).map_err(stdout_err)?;
        }
    }
    Ok(())
}
