use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use speedscale_cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            eprintln!("{}", out.summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            print!("{}", e.to_json());
            eprintln!("error: {e}");
            let _ = std::io::stdout().flush();
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
