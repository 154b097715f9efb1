use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use lexirank_cli::{exit_code, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = run(cli.command, &cli.config, &mut out).and_then(|()| out.flush().map_err(Into::into));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lexirank: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
