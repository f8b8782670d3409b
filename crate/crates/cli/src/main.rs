mod args;
mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::Parser;
use thiserror::Error;

use args::{Cli, Command};

const THREADS_VAR: &str = "SYMPLECTIC_HECKE_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Validation(format!("{THREADS_VAR} must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Validation(e.to_string()))
}

fn parse(argv: Vec<OsString>) -> Result<Cli, clap::Error> {
    let (pos, path) = config::scan(&argv);
    let (Some(pos), Some(path)) = (pos, path) else {
        return Cli::try_parse_from(argv);
    };
    let name = argv[pos].to_string_lossy().into_owned();
    match config::config_tokens(&path, &name) {
        Ok(extra) => Cli::try_parse_from(config::splice(&argv, pos, extra)),
        Err(e) => Err(clap::Error::raw(clap::error::ErrorKind::InvalidValue, format!("{e}\n"))),
    }
}

fn run(cli: &Cli) -> Result<output::Output, CliError> {
    match &cli.command {
        Command::Cosets(a) => commands::cosets(a),
        Command::Product(a) => commands::product(a),
        Command::Lfactor(a) => commands::lfactor(a),
        Command::Measure(a) => commands::measure(a),
        Command::Leveldensity(a) => commands::leveldensity(a),
        Command::Counting(a) => commands::counting(a),
        Command::Verify(a) => commands::verify(a),
    }
}

fn main() -> ExitCode {
    let cli = match parse(std::env::args_os().collect()) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code());
    }
    let out = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    if let Err(e) = out.write(cli.format, cli.output.as_deref()) {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code());
    }
    if out.verified {
        ExitCode::SUCCESS
    } else {
        eprintln!("error: a check in `{}` failed", out.command);
        ExitCode::from(3)
    }
}
