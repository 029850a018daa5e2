use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use lasekit_cli::{run, Cli, FloatFormat};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = FloatFormat::from_env().and_then(|f| run(&cli, &f, &mut out));
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lasekit: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
