//! Configuration-driven entry point: one command per run, a summary on
//! standard output and tables at the output path.
//!
//! Exit codes: 0 when every check passed, 1 when a mathematical check failed
//! or a computation broke down, 2 for usage, configuration or precondition
//! errors.

mod commands;
pub mod config;

use std::io::Write;
use std::path::{Path, PathBuf};

pub use config::{Command, ConfigError, ConfigFile, GridChoice, KeySpec, MetricKind, RunConfig, KEYS};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// A named table; the primary table has an empty name.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub text: String,
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub summary: Vec<String>,
    pub tables: Vec<Table>,
    pub passed: bool,
}

impl Report {
    fn new() -> Self {
        Self {
            summary: Vec::new(),
            tables: Vec::new(),
            passed: true,
        }
    }

    fn line(&mut self, text: impl Into<String>) {
        self.summary.push(text.into());
    }

    fn table(&mut self, name: &'static str, text: String) {
        self.tables.push(Table { name, text });
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        self.line(format!("{} {what}", if ok { "PASS" } else { "FAIL" }));
        self.passed &= ok;
    }
}

/// Exit code for a library error: broken preconditions are usage errors.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidParameter { .. }
        | Error::BelowThreshold { .. }
        | Error::KappaAboveOne { .. }
        | Error::Dimension { .. }
        | Error::NonzeroBoundary { .. }
        | Error::OutsideDomain { .. }
        | Error::Unsupported(_) => EXIT_USAGE,
        _ => EXIT_CHECK_FAILED,
    }
}

/// `out.csv` with name `crosscheck` becomes `out.crosscheck.csv`.
pub fn table_path(out: &Path, name: &str) -> PathBuf {
    if name.is_empty() {
        return out.to_path_buf();
    }
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let file = match out.extension() {
        Some(ext) => format!("{stem}.{name}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{name}"),
    };
    out.with_file_name(file)
}

/// Runs the configured command and writes its report.
pub fn execute(config: &RunConfig) -> Result<Report, Error> {
    commands::dispatch(config)
}

/// Runs, prints the summary to `stdout`, writes tables, and returns the exit
/// code.
pub fn run(config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let report = match execute(config) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "{}: {e}", config.command);
            return exit_code(&e);
        }
    };
    for line in &report.summary {
        let _ = writeln!(stdout, "{line}");
    }
    if config.verbose {
        for t in &report.tables {
            let _ = writeln!(stdout);
            let _ = write!(stdout, "{}", t.text);
        }
    }
    if let Some(out) = &config.out {
        for t in &report.tables {
            let path = table_path(out, t.name);
            if let Err(e) = std::fs::write(&path, &t.text) {
                let _ = writeln!(stderr, "cannot write {}: {e}", path.display());
                return EXIT_USAGE;
            }
        }
    }
    if report.passed {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn secondary_tables_sit_next_to_the_primary() {
        let p = Path::new("/tmp/run/out.tsv");
        assert_eq!(table_path(p, ""), PathBuf::from("/tmp/run/out.tsv"));
        assert_eq!(
            table_path(p, "crosscheck"),
            PathBuf::from("/tmp/run/out.crosscheck.tsv")
        );
        assert_eq!(
            table_path(Path::new("t"), "x"),
            PathBuf::from("x").with_file_name("t.x")
        );
    }

    #[test]
    fn precondition_errors_are_usage_errors() {
        let e = Error::BelowThreshold {
            n: 7,
            kappa: 0.5,
            kappa_star: 0.7,
        };
        assert_eq!(exit_code(&e), EXIT_USAGE);
        assert_eq!(exit_code(&Error::Eigen("x".into())), EXIT_CHECK_FAILED);
    }
}
