use std::process::ExitCode;

use clap::Parser;
use cpg_cli::{configure_threads, run, threads_from_env, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let result = threads_from_env()
        .and_then(configure_threads)
        .and_then(|()| run(cli.command, std::io::stdout().lock()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cpg: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
