//! Numerical tolerances shared by every validator.
//!
//! All defaults are tuned for double precision on spaces of dimension at
//! most 64. Each field can be overridden by name with [`Tolerances::set`],
//! which is what the CLI's `--tol key=value` flag uses.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Frobenius bound on `‖A − A†‖`.
    pub herm: f64,
    /// Frobenius bound on `‖P² − P‖`.
    pub proj: f64,
    /// Distance of a projector eigenvalue from 0 or 1.
    pub eig: f64,
    /// Distance of a density-matrix trace from 1.
    pub tr: f64,
    /// Accepted negativity of the smallest eigenvalue.
    pub psd: f64,
    /// Slack on the Bloch unit ball.
    pub bloch: f64,
    /// Clamping slack for Born probabilities.
    pub prob: f64,
    /// Orthogonality and completeness residuals of a PVM.
    pub pvm: f64,
    /// Quantization grid for projector keys.
    pub key: f64,
    /// Frame-function normalization residual.
    pub frame: f64,
    /// Max-norm residual of the linear reconstruction.
    pub lin: f64,
    /// Negativity beyond which a reconstruction is rejected outright.
    pub margin: f64,
    /// Largest accepted design-matrix condition number.
    pub cond: f64,
    /// Cap on composite Hilbert dimensions.
    pub max_dim: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: 1e-10,
            proj: 1e-10,
            eig: 1e-8,
            tr: 1e-10,
            psd: 1e-9,
            bloch: 1e-9,
            prob: 1e-9,
            pvm: 1e-10,
            key: 1e-8,
            frame: 1e-9,
            lin: 1e-9,
            margin: 1e-6,
            cond: 1e8,
            max_dim: 64,
        }
    }
}

impl Tolerances {
    pub const KEYS: [&'static str; 14] = [
        "herm", "proj", "eig", "tr", "psd", "bloch", "prob", "pvm", "key", "frame", "lin",
        "margin", "cond", "max_dim",
    ];

    /// Overrides one tolerance by name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let parse = |v: &str| -> Result<f64> {
            let x: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("tolerance `{key}` has invalid value `{v}`")))?;
            if !x.is_finite() || x < 0.0 {
                return Err(Error::Parse(format!("tolerance `{key}` must be finite and non-negative")));
            }
            Ok(x)
        };
        match key {
            "herm" => self.herm = parse(value)?,
            "proj" => self.proj = parse(value)?,
            "eig" => self.eig = parse(value)?,
            "tr" => self.tr = parse(value)?,
            "psd" => self.psd = parse(value)?,
            "bloch" => self.bloch = parse(value)?,
            "prob" => self.prob = parse(value)?,
            "pvm" => self.pvm = parse(value)?,
            "key" => {
                let k = parse(value)?;
                if k == 0.0 {
                    return Err(Error::Parse("tolerance `key` must be positive".into()));
                }
                self.key = k;
            }
            "frame" => self.frame = parse(value)?,
            "lin" => self.lin = parse(value)?,
            "margin" => self.margin = parse(value)?,
            "cond" => self.cond = parse(value)?,
            "max_dim" => {
                self.max_dim = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("max_dim has invalid value `{value}`")))?
            }
            other => return Err(Error::UnknownTolerance(other.to_string())),
        }
        Ok(())
    }

    /// Parses a `key=value` override and applies it.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (key, value) = spec
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got `{spec}`")))?;
        self.set(key.trim(), value)
    }
}
