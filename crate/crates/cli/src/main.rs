use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use cvcomp_cli::{run, Cli};

fn main() -> ExitCode {
    // clap exits with status 2 on malformed arguments.
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = run(&cli, &mut out);
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cvcomp: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
