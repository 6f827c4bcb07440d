use clap::Parser;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = qroutesim_cli::Cli::parse();
    match qroutesim_cli::run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qroutesim: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
