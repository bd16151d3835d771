use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use altrank_core::Error;

pub const TOOL: &str = "altrank";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Machine-readable output of every subcommand.
#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub field: Option<String>,
    pub parameters: Value,
    pub seed: Option<u64>,
    pub passed: bool,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Value>,
}

impl Report {
    pub fn new(command: String, field: Option<String>, parameters: Value, seed: Option<u64>) -> Self {
        Report {
            tool: TOOL,
            version: VERSION,
            command,
            field,
            parameters,
            seed,
            passed: true,
            results: Value::Null,
            timings: None,
        }
    }

    pub fn with_timing(mut self, started: Option<Instant>) -> Self {
        if let Some(t) = started {
            self.timings = Some(serde_json::json!({ "total_ms": t.elapsed().as_millis() as u64 }));
        }
        self
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
    Io(std::io::Error),
}

impl CliError {
    /// 1 for a violated mathematical contract, 2 for unusable input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::Contract(_)) => 1,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(Error::Json(e))
    }
}

pub type CliResult<T> = Result<T, CliError>;
