//! Command-line frontend for the repeatable-visit team orienteering solver.
//!
//! All persistence lives here: instances, solutions, networks, reward arcs,
//! and benchmark specs are TOML documents (see `formats`), search traces and
//! benchmark tables are CSV, plots are SVG.

pub mod bench;
pub mod cli;
pub mod commands;
pub mod formats;
pub mod gen;
pub mod plot;

use std::fmt;
use std::path::Path;

pub use cli::{run, Cli};

/// Errors surfaced to the terminal, each mapped to a stable exit code:
/// 1 validation/data failure, 2 usage error, 3 I/O error.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Data(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }
}

/// Supported solving algorithms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Algorithm {
    Greedy,
    Seqop,
    Alns,
    Exact,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::Seqop => "seqop",
            Algorithm::Alns => "alns",
            Algorithm::Exact => "exact",
        }
    }

    pub fn parse(name: &str) -> Result<Self, CliError> {
        match name {
            "greedy" => Ok(Algorithm::Greedy),
            "seqop" => Ok(Algorithm::Seqop),
            "alns" => Ok(Algorithm::Alns),
            "exact" => Ok(Algorithm::Exact),
            other => Err(CliError::Usage(format!(
                "unknown algorithm '{other}' (expected greedy, seqop, alns, or exact)"
            ))),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
