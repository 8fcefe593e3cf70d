mod args;
mod commands;
mod config;
mod output;

use std::fmt;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::Cli;

/// An invalid configuration (exit status 2).
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

/// A completed run whose report shows a violated hypothesis (exit status 3).
#[derive(Debug)]
pub struct Violation(pub String);

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Violation {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.is::<Violation>() {
        return 3;
    }
    if err.is::<Usage>() {
        return 2;
    }
    match err.downcast_ref::<mushy::Error>() {
        Some(mushy::Error::Io(_) | mushy::Error::Json(_) | mushy::Error::Csv(_) | mushy::Error::EventLimit(_)) => 1,
        Some(_) => 2,
        None => 1,
    }
}

fn parse(argv: Vec<std::ffi::OsString>) -> Result<Cli, ExitCode> {
    Cli::try_parse_from(argv).map_err(|e| {
        let _ = e.print();
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
            _ => ExitCode::from(2),
        }
    })
}

fn main() -> ExitCode {
    let mut cli = match parse(std::env::args_os().collect()) {
        Ok(cli) => cli,
        Err(code) => return code,
    };
    if let Some(path) = cli.config.take() {
        if cli.command.is_some() {
            eprintln!("error: --config replaces the subcommand; give one or the other");
            return ExitCode::from(2);
        }
        let argv = match config::argv_from_file(&path, cli.workers) {
            Ok(argv) => argv,
            Err(e) => {
                eprintln!("error: {e:#}");
                return ExitCode::from(exit_code(&e));
            }
        };
        cli = match parse(argv) {
            Ok(cli) => cli,
            Err(code) => return code,
        };
    }
    let Some(command) = cli.command else {
        eprintln!("error: a subcommand or --config is required (see --help)");
        return ExitCode::from(2);
    };
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
