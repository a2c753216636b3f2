use std::process::ExitCode;

use clap::Parser;
use halbach_cli::cli::{run, Cli};
use halbach_cli::CliError;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error[ConfigParse]: cannot start {n} workers: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli.command) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            if let CliError::BandFailure { lines, .. } = &e {
                print!("{lines}");
            }
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
