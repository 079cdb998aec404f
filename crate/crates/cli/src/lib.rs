//! Command-line front end for `tokenwalk`.
//!
//! [`run_cli`] parses an argument vector, runs one subcommand and returns the
//! exit status together with the JSON document to print. Exit status 1 marks
//! invalid input or a refused hypothesis, 2 a size cap and 3 a failed check
//! under `verify`.

pub mod args;
pub mod commands;
pub mod report;
pub mod verify;

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::Parser;
use tokenwalk::Error;

use crate::args::{Cli, Command};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_SIZE_CAP: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    /// Report on success or a failed `verify`, error object otherwise; help
    /// and version text for those requests.
    pub report: String,
}

impl Outcome {
    pub fn is_error(&self) -> bool {
        self.status == EXIT_INVALID || self.status == EXIT_SIZE_CAP
    }
}

fn failure(err: &Error) -> Outcome {
    let status = match err {
        Error::SizeCap { .. } => EXIT_SIZE_CAP,
        _ => EXIT_INVALID,
    };
    Outcome {
        status,
        report: report::library_error_json(err),
    }
}

pub fn run_cli<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    status: EXIT_OK,
                    report: e.to_string(),
                },
                _ => Outcome {
                    status: EXIT_INVALID,
                    report: report::error_json("usage", None, e.to_string().trim_end().to_string()),
                },
            }
        }
    };
    let result = match &cli.command {
        Command::Sample(a) => commands::sample(a).map(|r| (r, true)),
        Command::Exact(a) => commands::exact(a).map(|r| (r, true)),
        Command::Bounds(a) => commands::bounds(a).map(|r| (r, true)),
        Command::Verify(a) => verify::verify(a),
        Command::Tokengraph(a) => commands::tokengraph(a).map(|r| (r, true)),
    };
    match result {
        Ok((report, true)) => Outcome {
            status: EXIT_OK,
            report,
        },
        Ok((report, false)) => Outcome {
            status: EXIT_VIOLATION,
            report,
        },
        Err(e) => failure(&e),
    }
}
