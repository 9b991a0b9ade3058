mod args;
mod commands;
mod error;
mod output;

use std::io::Write;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;

use args::{Cli, Command, Format};
use error::CliError;
use output::{Document, Meta};

fn render(cli: &Cli) -> Result<String, CliError> {
    let report = commands::dispatch(&cli.command, &cli.common)?;
    let default = if matches!(cli.command, Command::Dispersive { .. }) { Format::Csv } else { Format::Json };
    match cli.common.format.unwrap_or(default) {
        Format::Csv => Ok(report.table.to_csv()),
        Format::Json => {
            let stamp =
                cli.common.stamp.then(|| SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()));
            let doc = Document {
                meta: Meta {
                    tool: "chargebus",
                    version: env!("CARGO_PKG_VERSION"),
                    command: cli.command.name(),
                    parallel: chargebus::sweep::is_parallel(),
                    generated_unix_seconds: stamp,
                },
                inputs: report.inputs,
                results: report.results,
            };
            Ok(chargebus::json::to_string(&doc).expect("document serializes"))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // nothing is written until the whole document is ready
    let result = render(&cli).and_then(|text| match &cli.common.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io { path: "<stdout>".into(), message: e.to_string() }),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("chargebus: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
