mod args;
mod commands;
mod output;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] atomsched::Error),
    #[error("{path}: {source}")]
    Instance { path: String, source: atomsched::Error },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("cannot format output: {0}")]
    Output(String),
}

impl CliError {
    fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) | CliError::Instance { source: e, .. } => e.exit_code() as u8,
            CliError::Io { .. } | CliError::Output(_) => 1,
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        CliError::Output(err.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(err: csv::Error) -> Self {
        CliError::Output(err.to_string())
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Solve {
            instance,
            objective,
            theta_d,
            n_d,
            format,
        } => commands::solve(&instance, objective, theta_d, n_d, format),
        Command::Enumerate {
            instance,
            objective,
            limit,
        } => commands::enumerate(&instance, objective, limit),
        Command::Gen { n, seed, out } => commands::generate(n, seed, out.as_deref()),
        Command::Bench {
            n_range,
            n_d_list,
            seeds,
            objective,
            theta_d,
            out,
            no_timing,
        } => commands::bench(commands::BenchRequest {
            sizes: &n_range.0,
            n_d_list: &n_d_list.0,
            seeds: &seeds.0,
            objective,
            theta_d,
            out: out.as_deref(),
            timing: !no_timing,
        }),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            // usage problems are validation errors; help and version are not
            return if err.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
