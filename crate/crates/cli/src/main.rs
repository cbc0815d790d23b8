mod batch;
mod cli;
mod commands;
mod error;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use crate::cli::Cli;
use crate::commands::{dispatch, Context};
use crate::error::CliError;

/// First non-empty line of a multi-line message, without clap's `error: ` tag.
pub(crate) fn first_line(message: &str) -> String {
    let line = message.lines().map(str::trim).find(|l| !l.is_empty()).unwrap_or("");
    line.strip_prefix("error: ").unwrap_or(line).to_string()
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_line());
    ExitCode::from(e.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::validation("usage", first_line(&e.to_string()))),
    };
    let ctx = match Context::from_env() {
        Ok(ctx) => ctx,
        Err(e) => return fail(&e),
    };
    match dispatch(&cli.command, &ctx) {
        Ok(out) => {
            match out.payload.render(cli.format) {
                Ok(text) => {
                    let mut stdout = std::io::stdout().lock();
                    if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                        return fail(&CliError::Io("cannot write to stdout".into()));
                    }
                }
                Err(e) => return fail(&e),
            }
            match &out.failure {
                Some(e) => fail(e),
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => fail(&e),
    }
}
