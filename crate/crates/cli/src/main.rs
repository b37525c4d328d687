use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use polylrc_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            if cli.out.is_none() {
                let _ = std::io::stdout().write_all(outcome.report.as_bytes());
            }
            if let Some(msg) = outcome.message {
                eprintln!("polylrc: {msg}");
            }
            ExitCode::from(outcome.code as u8)
        }
        Err(f) => {
            eprintln!("polylrc: {}", f.message);
            ExitCode::from(f.code as u8)
        }
    }
}
