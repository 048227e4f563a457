//! Front end for `krylov-core`: figure presets, ad-hoc runs, sweeps and
//! Lanczos on user matrices.

pub mod cli;
pub mod commands;
pub mod config;
pub mod format;
pub mod plot;
pub mod presets;

use clap::Parser;
use krylov_core::KrylovError;
use std::ffi::OsString;
use std::fmt;

/// Exit code 1 for usage errors, 2 for numerical or invariant failures.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Failure(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Failure(m) => write!(f, "error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<KrylovError> for CliError {
    fn from(e: KrylovError) -> Self {
        match e {
            KrylovError::InvalidSpec(_)
            | KrylovError::InvalidWeight(_)
            | KrylovError::UnknownLabel(_)
            | KrylovError::NotHermitian(_)
            | KrylovError::ZeroSeed => CliError::Usage(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

/// Seed for randomized self-test fixtures, from `KRYLOV_SEED`.
pub fn fixture_seed(default: u64) -> u64 {
    std::env::var("KRYLOV_SEED")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(default)
}

/// Parse arguments, dispatch, and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let parsed = match cli::Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    if let Some(n) = parsed.threads {
        // 0 lets rayon pick the core count
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("warning: thread pool already configured: {e}");
        }
    }
    let globals = commands::Globals {
        output: parsed.output.clone(),
        format: parsed.format,
        plot: parsed.plot.clone(),
        tol: parsed.tol,
    };
    let result = match &parsed.command {
        cli::Command::Repro { figure_id } => commands::cmd_repro(figure_id, &globals),
        cli::Command::Run(a) => commands::cmd_run(a, &globals),
        cli::Command::Sweep(a) => commands::cmd_sweep(a, &globals),
        cli::Command::Lanczos(a) => commands::cmd_lanczos(a, &globals),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
