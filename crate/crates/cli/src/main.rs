use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use cr_constancy_cli::app::{execute, Cli};
use cr_constancy_cli::commands::EXIT_USAGE;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE as u8),
            };
        }
    };
    let path = cli.command.spec_path();
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    match execute(&cli, &text) {
        Ok(run) => {
            print!("{}", run.report.render(cli.format));
            ExitCode::from(run.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
