//! Command-line front end for `sclgap-core`.
//!
//! Every command prints one JSON document (or `--format text` lines) on
//! standard output. Exit code 2 means the input did not parse, 3 means it
//! parsed but lies outside what the library handles.

pub mod app;
pub mod json;

use std::ffi::OsString;

use clap::Parser;

pub use app::{execute, render, Cli, CliError};
pub use json::{revalidate, Document};

/// Runs the command line and returns `(exit code, stdout, stderr)`.
pub fn run<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 { (0, text, String::new()) } else { (2, String::new(), text) };
        }
    };
    match execute(&cli) {
        Ok(doc) => (0, render(&cli, &doc) + "\n", String::new()),
        Err(e) => (e.exit_code(), String::new(), format!("error: {}\n", e.message())),
    }
}
