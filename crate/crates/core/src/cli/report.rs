use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

/// How a checked value relates to its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `value ≤ tolerance`
    AtMost,
    /// `value ≥ tolerance`
    AtLeast,
    /// `value = tolerance`, for exact counts.
    Equals,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, comparison: Comparison::AtMost, passed: value <= tolerance }
    }

    pub fn at_least(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, comparison: Comparison::AtLeast, passed: value >= tolerance }
    }

    pub fn equals(name: impl Into<String>, value: f64, expected: f64) -> Self {
        Self { name: name.into(), value, tolerance: expected, comparison: Comparison::Equals, passed: value == expected }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub results: Value,
    pub checks: Vec<Check>,
    pub summary: Summary,
    /// Kept last so the deterministic part of the document is a prefix.
    pub timestamp: String,
}

#[derive(Serialize)]
struct Payload<'a> {
    command: &'a str,
    config: &'a Value,
    results: &'a Value,
    checks: &'a [Check],
    summary: &'a Summary,
}

impl Report {
    pub fn new(command: &str, config: Value, results: Value, checks: Vec<Check>) -> Self {
        let passed = checks.iter().filter(|c| c.passed).count();
        let failed = checks.len() - passed;
        Self {
            command: command.into(),
            config,
            results,
            checks,
            summary: Summary { passed, failed, ok: failed == 0 },
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
        }
    }

    /// Everything except the timestamp.
    pub fn payload_json(&self) -> String {
        let payload = Payload {
            command: &self.command,
            config: &self.config,
            results: &self.results,
            checks: &self.checks,
            summary: &self.summary,
        };
        serde_json::to_string_pretty(&payload).expect("report serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per check; structured results are JSON-only.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["command", "name", "value", "tolerance", "comparison", "passed"]).expect("in-memory write");
        for c in &self.checks {
            let comparison = match c.comparison {
                Comparison::AtMost => "at_most",
                Comparison::AtLeast => "at_least",
                Comparison::Equals => "equals",
            };
            w.write_record([
                self.command.as_str(),
                c.name.as_str(),
                &format!("{:e}", c.value),
                &format!("{:e}", c.tolerance),
                comparison,
                if c.passed { "true" } else { "false" },
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

/// I/O failure while reading inputs or writing outputs.
#[derive(Debug, thiserror::Error)]
#[error("{path}: {source}")]
pub struct IoError {
    pub path: String,
    #[source]
    pub source: std::io::Error,
}

/// Writes `contents` to a temporary file beside `path`, then renames it
/// into place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> std::result::Result<(), IoError> {
    let wrap = |source| IoError { path: path.display().to_string(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(wrap)?;
    tmp.write_all(contents.as_bytes()).map_err(wrap)?;
    tmp.flush().map_err(wrap)?;
    tmp.persist(path).map_err(|e| wrap(e.error))?;
    Ok(())
}

pub fn read_input(path: &Path) -> std::result::Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError { path: path.display().to_string(), source })
}

pub(crate) fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(Error::from)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample() -> Report {
        Report::new(
            "demo",
            json!({"seed": 1}),
            json!({"x": 1.5}),
            vec![Check::at_most("residual", 1e-12, 1e-9), Check::at_least("count", 0.0, 1.0)],
        )
    }

    #[test]
    fn summary_counts_checks() {
        let r = sample();
        assert_eq!(r.summary, Summary { passed: 1, failed: 1, ok: false });
        assert!(Report::new("empty", json!({}), json!({}), vec![]).summary.ok);
    }

    #[test]
    fn timestamp_is_last_and_excluded_from_payload() {
        let r = sample();
        let full = r.to_json();
        let ts = full.find("\"timestamp\"").unwrap();
        assert!(full[ts..].lines().count() <= 2);
        assert!(!r.payload_json().contains("timestamp"));
        let mut later = r.clone();
        later.timestamp = "2000-01-01T00:00:00.000Z".into();
        assert_eq!(r.payload_json(), later.payload_json());
    }

    #[test]
    fn csv_has_one_row_per_check() {
        let csv = sample().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "command,name,value,tolerance,comparison,passed");
        assert!(lines[1].starts_with("demo,residual,1e-12,1e-9,at_most,true"));
        assert!(lines[2].ends_with("at_least,false"));
    }

    #[test]
    fn atomic_write_replaces_whole_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        write_atomic(&path, "first").unwrap();
        write_atomic(&path, "second").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn atomic_write_into_missing_directory_fails_cleanly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("missing").join("out.json");
        assert!(write_atomic(&path, "x").is_err());
        assert!(!path.exists());
    }
}
