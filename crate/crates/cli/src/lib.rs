//! Scenario runner behind the `entdiss` binary.
//!
//! Every scenario renders a CSV document in memory; [`run`] decides where it
//! goes and maps failures to exit codes (1 for configuration and I/O, 2 for
//! numerical failures).

use std::path::PathBuf;

mod config;
mod csv;
mod scenarios;

pub use config::{
    parse_args, parse_config, parse_config_text, read_config_file, Args, Scenario, ScenarioConfig,
};
pub use csv::Csv;
pub use scenarios::run_scenario;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Usage(#[from] clap::Error),
    #[error("{0}")]
    Config(String),
    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("numerical failure: {0}")]
    Numerical(#[from] entdiss::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Numerical(_) => 2,
            _ => 1,
        }
    }
}

/// Parses `argv`, runs the scenario and writes its CSV. Returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match try_run(argv) {
        Ok(()) => 0,
        Err(CliError::Usage(e)) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            0
        }
        Err(e) => {
            eprintln!("entdiss: {e}");
            e.exit_code()
        }
    }
}

fn try_run<I, T>(argv: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = parse_args(argv)?;
    let text = run_scenario(&cfg)?;
    match &cfg.output {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?,
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })?;
        }
    }
    Ok(())
}
