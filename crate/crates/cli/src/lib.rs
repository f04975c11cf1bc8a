//! Command-line front end for `cayley-core`.

pub mod commands;
pub mod error;
pub mod format;
pub mod input;
pub mod verify;

use std::ffi::OsString;

use clap::Parser;

pub use commands::{Cli, Command};
pub use error::{CliError, CliResult};
pub use format::{Document, Format};

/// What a run printed and how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `argv` (program name first), executes, and renders the document.
///
/// Exit codes: 0 on success, 1 on a domain error or a failed check, 2 on a
/// usage error.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let (stdout, stderr) = if code == 0 { (text, String::new()) } else { (String::new(), text) };
            return Outcome { code, stdout, stderr };
        }
    };
    match commands::execute(&cli).and_then(|em| Ok((em.ok, em.doc.render(cli.format)?))) {
        Ok((ok, text)) => {
            let code = if ok { 0 } else { 1 };
            match &cli.out {
                Some(path) => match std::fs::write(path, &text) {
                    Ok(()) => Outcome { code, stdout: String::new(), stderr: String::new() },
                    Err(source) => failure(CliError::Io { path: path.display().to_string(), source }),
                },
                None => Outcome { code, stdout: text, stderr: String::new() },
            }
        }
        Err(e) => failure(e),
    }
}

fn failure(e: CliError) -> Outcome {
    Outcome { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") }
}
