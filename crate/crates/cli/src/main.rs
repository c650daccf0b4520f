mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::Failure;

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Metrics(a) => commands::metrics(a),
        Command::Teleport(a) => commands::teleport(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Figure(a) => commands::figure(a),
        Command::Verify(a) => commands::verify(a),
    }
}

fn main() -> ExitCode {
    let argv = match args::expand_response_files(std::env::args_os().collect()) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: --args-from: {e}");
            return ExitCode::from(3);
        }
    };
    // clap exits with 2 on usage errors and 0 for --help/--version
    let cli = Cli::try_parse_from(argv).unwrap_or_else(|e| e.exit());
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) | Failure::Io(m) => eprintln!("error: {m}"),
                Failure::Verify => eprintln!("verification failed"),
            }
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
