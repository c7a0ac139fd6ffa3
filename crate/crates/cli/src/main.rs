//! `triplepass`: seeded, reproducible experiments on the three-pass
//! group-action protocol.

mod args;
mod artifact;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Format};
use artifact::{emit, CliResult};

fn dispatch(cli: &Cli) -> CliResult<u8> {
    let (outcome, output, default) = match &cli.command {
        Command::Demo(a) => (commands::demo(a)?, &a.output, Format::Human),
        Command::Run(a) => (commands::run(a)?, &a.output, Format::Json),
        Command::Analyze(a) => (commands::analyze(a)?, &a.output, Format::Json),
        Command::Check(a) => (commands::check(a)?, &a.output, Format::Json),
        Command::Search(a) => (commands::search(a)?, &a.output, Format::Json),
    };
    emit(&outcome, output, default)?;
    Ok(outcome.code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("triplepass: --workers must be positive");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .expect("thread pool configured once");
    }
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("triplepass: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
