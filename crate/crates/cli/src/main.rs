use std::process::ExitCode;

use clap::Parser;
use polariscope_cli::{run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            for path in report.outputs.iter().chain([&report.sidecar]) {
                println!("{}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("polariscope: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
