//! Command-line driver: configuration, orchestration and report emission.
//!
//! Every run writes `report.json` and zero or more CSV files into the output
//! directory. Each file carries the config hash (a `# cfg=<hash>` first line
//! in CSV, a `cfg_hash` key in JSON). Data files depend only on the config,
//! so identical configs reproduce them byte for byte.

mod config;
mod output;
mod run;

pub use config::{parse_args, parse_complex, Command, EllipseParams, Invocation, LimitParams, LsvParams, RunConfig, SEED_ENV};
pub use run::{run, ReportEnvelope};

use std::ffi::OsString;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Usage(clap::Error),

    #[error("invalid configuration `{key}`: {reason}")]
    Config { key: &'static str, reason: String },

    #[error("numerical failure{}: {source}", trial.map(|t| format!(" in trial {t}")).unwrap_or_default())]
    Numerical {
        trial: Option<u64>,
        source: elliptic_core::Error,
    },

    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(e) if !e.use_stderr() => 0,
            CliError::Usage(_) | CliError::Config { .. } => 2,
            CliError::Numerical { .. } => 3,
            CliError::Io { .. } => 1,
        }
    }

    pub(crate) fn numerical(trial: Option<u64>, source: elliptic_core::Error) -> Self {
        if source.is_numerical() {
            CliError::Numerical { trial, source }
        } else {
            source.into()
        }
    }
}

impl From<elliptic_core::Error> for CliError {
    fn from(e: elliptic_core::Error) -> Self {
        match e {
            elliptic_core::Error::Config { key, reason } => CliError::Config { key, reason },
            elliptic_core::Error::Argument(reason) => CliError::Config { key: "argument", reason },
            other => CliError::Numerical {
                trial: None,
                source: other,
            },
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env_seed = std::env::var(SEED_ENV).ok();
    let inv = match parse_args(args, env_seed.as_deref()) {
        Ok(inv) => inv,
        Err(CliError::Usage(e)) => {
            let _ = e.print();
            return CliError::Usage(e).exit_code();
        }
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(inv.threads.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return 1;
        }
    };
    match pool.install(|| run(&inv.config)) {
        Ok(report) => {
            println!(
                "{} cfg={} -> {}",
                serde_json::to_string(&inv.config.command).unwrap_or_default().trim_matches('"'),
                report.cfg_hash,
                inv.config.output.display()
            );
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
