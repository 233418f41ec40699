use std::io;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("reproduction mismatch: {} entries outside tolerance", .0.len())]
    Mismatch(Vec<String>),
    #[error("io error: {0}")]
    Io(#[from] io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Mismatch(_) => 4,
            _ => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Numerical(_) => "numerical",
            CliError::Mismatch(_) => "mismatch",
            CliError::Io(_) => "io",
            CliError::Csv(_) => "csv",
            CliError::Json(_) => "json",
        }
    }
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    exit_code: i32,
    kind: &'a str,
    message: String,
    details: &'a [String],
}

/// Writes `error_report.json` into `dir`.
pub fn write_report(dir: &Path, command: &str, err: &CliError) -> io::Result<()> {
    let details: &[String] = match err {
        CliError::Mismatch(d) => d,
        _ => &[],
    };
    let report = Report {
        command,
        exit_code: err.exit_code(),
        kind: err.kind(),
        message: err.to_string(),
        details,
    };
    std::fs::create_dir_all(dir)?;
    let text = serde_json::to_string_pretty(&report).map_err(io::Error::other)?;
    std::fs::write(dir.join("error_report.json"), text + "\n")
}
