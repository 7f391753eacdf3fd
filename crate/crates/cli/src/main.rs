use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use proframe_cli::{run, Cli, CliError, Outcome};

fn emit(outcome: &Outcome) -> Result<(), CliError> {
    match &outcome.output {
        Some(path) => std::fs::write(path, &outcome.body)?,
        None => std::io::stdout().lock().write_all(outcome.body.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(&cli).and_then(|outcome| emit(&outcome).map(|()| outcome.exit_code())) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("proframe: {err}");
            err.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
