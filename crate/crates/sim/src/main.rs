use std::process::ExitCode;

use afmtj::{run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            println!("{}", report.digest);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("afmtj: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
