//! Batch front-end: parse a JSON run configuration, execute the verification
//! suites, and emit deterministic machine-readable reports (JSON + CSV) and
//! human-readable tables.
//!
//! Exit-code contract of the binary: 0 when every asserted check passes,
//! 1 on a residual failure, 2 on a usage or configuration error.

pub mod commands;
pub mod config;
pub mod output;

/// A usage or configuration problem; maps to exit code 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError(pub String);

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for CliError {}

impl From<sphereprod::Error> for CliError {
    fn from(err: sphereprod::Error) -> Self {
        CliError(err.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError(format!("i/o error: {err}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        CliError(format!("config parse error: {err}"))
    }
}
