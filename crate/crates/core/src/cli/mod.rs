//! Command implementations behind the `gleason-lab` binary.
//!
//! Every command returns an [`Outcome`]: a [`Report`] for stdout, an
//! optional artifact for `--out`, and the process exit code. Nothing here
//! touches the filesystem except input reads and [`emit`].

mod commands;
mod report;
mod suite;

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::marginality::Verdict;
use crate::tolerance::Tolerances;

pub use commands::{
    check_marginal, demo_counterexample, demo_intertwine, eval, gen_pvm, reconstruct, COUNTEREXAMPLE_CONTROL_BLOCH,
};
pub use report::{read_input, write_atomic, Check, Comparison, IoError, Report, Summary};
pub use suite::{verify_suite, SuiteParams, EXACT_TOL, IDEMPOTENCE_TOL, RECONSTRUCTION_TOL};

pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    /// Parse or domain error, or a failed check.
    pub const INVALID: i32 = 2;
    pub const NON_MARGINAL: i32 = 3;
    pub const INCONCLUSIVE: i32 = 4;
}

pub fn verdict_exit_code(v: Verdict) -> i32 {
    match v {
        Verdict::Marginal => exit::OK,
        Verdict::NonMarginal => exit::NON_MARGINAL,
        Verdict::Inconclusive => exit::INCONCLUSIVE,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Settings shared by every command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    /// `--tol` overrides in key order; later flags win.
    pub tolerance_overrides: BTreeMap<String, String>,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    tolerances: Tolerances,
}

impl RunConfig {
    pub fn new(seed: u64, overrides: &[String], format: Format, out: Option<PathBuf>) -> Result<Self> {
        let mut tolerances = Tolerances::default();
        let mut map = BTreeMap::new();
        for spec in overrides {
            tolerances.apply_override(spec)?;
            let (k, v) = spec.split_once('=').expect("validated by apply_override");
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self { seed, tolerance_overrides: map, format, out, tolerances })
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }

    /// Config echo: the shared settings merged with command parameters.
    pub(crate) fn echo(&self, params: Value) -> Value {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let (Value::Object(base), Value::Object(extra)) = (&mut v, params) {
            base.extend(extra);
        }
        v
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Domain(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io(_) => exit::IO,
            Self::Domain(_) => exit::INVALID,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Io(_) => "Io",
            Self::Domain(e) => e.kind(),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    /// Written to `--out` in place of the report when present.
    pub artifact: Option<String>,
    pub exit_code: i32,
}

impl Outcome {
    /// Exit 0 iff every check passed.
    pub(crate) fn from_checks(report: Report, artifact: Option<String>) -> Self {
        let exit_code = if report.summary.ok { exit::OK } else { exit::INVALID };
        Self { report, artifact, exit_code }
    }

    pub fn rendered_report(&self, format: Format) -> String {
        match format {
            Format::Json => self.report.to_json(),
            Format::Csv => self.report.to_csv(),
        }
    }
}

/// Writes the artifact (or the report) to `cfg.out` and returns the text
/// destined for stdout.
pub fn emit(outcome: &Outcome, cfg: &RunConfig) -> CliResult<String> {
    let rendered = outcome.rendered_report(cfg.format);
    if let Some(path) = &cfg.out {
        let body = outcome.artifact.clone().unwrap_or_else(|| rendered.clone());
        write_atomic(path, &with_newline(body))?;
    }
    Ok(with_newline(rendered))
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}
