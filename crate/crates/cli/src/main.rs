use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = tokenwalk_cli::run_cli(std::env::args_os());
    let written = if outcome.is_error() {
        std::io::stderr().write_all(outcome.report.as_bytes())
    } else {
        std::io::stdout().write_all(outcome.report.as_bytes())
    };
    if written.is_err() {
        return ExitCode::from(1);
    }
    ExitCode::from(outcome.status as u8)
}
