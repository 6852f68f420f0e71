//! `hedgetomo`: exact-risk comparisons of tomography estimators from the command line.
//!
//! Exit codes: 0 success, 2 invalid input, 3 solver failure, 4 impossible data.

mod args;
mod commands;
mod error;
mod output;
mod parse;
mod settings;

use clap::Parser;

fn main() {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = commands::run(cli.command) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
