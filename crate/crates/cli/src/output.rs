//! Report rendering and the exit-code contract.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::ValueEnum;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// A rendered report and whether every check in it passed.
pub struct Report {
    pub body: String,
    pub passed: bool,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or arguments: exit 2.
    Usage(String),
    /// A computation that could not complete: exit 1.
    Failure(String),
}

impl From<motzkin_core::Error> for CliError {
    fn from(e: motzkin_core::Error) -> Self {
        use motzkin_core::Error::*;
        match e {
            GsdInconsistency { .. } | NoConvergence { .. } | NonPhysicalRoots(_) | ZeroVector | DimensionMismatch(..) => {
                CliError::Failure(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = ::csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub fn lines<I: IntoIterator<Item = String>>(items: I) -> String {
    let mut s = String::new();
    for item in items {
        let _ = writeln!(s, "{item}");
    }
    s
}

pub fn emit(body: &str, out: Option<&PathBuf>) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, body).map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}
