use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

mod cli;
mod commands;
mod error;
mod maps;

use cli::Cli;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    ExitCode::SUCCESS
                }
                _ => {
                    // Usage problems, including a bare invocation, go to
                    // stderr and count as validation errors.
                    eprint!("{}", e.render());
                    ExitCode::from(1)
                }
            };
        }
    };
    match commands::run(cli) {
        Ok(manifest) => {
            println!("{manifest}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("fatoulab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
