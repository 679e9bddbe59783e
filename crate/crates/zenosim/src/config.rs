//! Experiment configuration: defaults, validation, and a flat
//! `key = value` file format with `#` comments.
//!
//! Keys match the command-line flag names. Flags parsed after a file
//! override the file's values.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measurement::ProjectorKind;

/// What kind of run to perform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Free evolution only, no measurements.
    Free,
    /// Ideal instantaneous reductions at scheduled times.
    Projective,
    /// Master-equation integration with a smoothed delta-train rate.
    Lindblad,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free" => Ok(Mode::Free),
            "projective" => Ok(Mode::Projective),
            "lindblad" => Ok(Mode::Lindblad),
            other => Err(Error::config(
                "mode",
                format!("expected 'free', 'projective' or 'lindblad', got '{other}'"),
            )),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Free => write!(f, "free"),
            Mode::Projective => write!(f, "projective"),
            Mode::Lindblad => write!(f, "lindblad"),
        }
    }
}

/// Complete description of one run. [`Default`] reproduces the standard
/// double-drive scenario with `Ω₁₂/Ω₀₁ = √15`.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub omega01: f64,
    pub omega12: f64,
    pub phi01: f64,
    pub phi12: f64,
    pub projector: ProjectorKind,
    /// Measurement counts, one curve per entry.
    pub n_values: Vec<usize>,
    pub mode: Mode,
    /// Integrated rate per measurement bump (lindblad mode).
    pub weight: f64,
    /// Bump standard deviation as a fraction of the recurrence time.
    pub width: f64,
    pub grid_points: usize,
    /// Grid endpoint in τ = t/T_P units.
    pub tau_max: f64,
    /// Detection margin for regime classification.
    pub epsilon: f64,
    /// Integrator step override (lindblad mode); the default resolves both
    /// the free oscillation and the bump width.
    pub step: Option<f64>,
    /// Directory for per-curve CSV files.
    pub csv_dir: Option<PathBuf>,
    pub svg_path: Option<PathBuf>,
    pub report_path: Option<PathBuf>,
    /// Add a raw-time column next to τ in CSV output.
    pub raw_time: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            omega01: 1.0,
            omega12: 15.0_f64.sqrt(),
            phi01: 0.0,
            phi12: 0.0,
            projector: ProjectorKind::Partial,
            n_values: vec![1, 2, 4, 8, 16, 64],
            mode: Mode::Projective,
            weight: 50.0,
            width: 5e-4,
            grid_points: 401,
            tau_max: 1.0,
            epsilon: 1e-3,
            step: None,
            csv_dir: None,
            svg_path: None,
            report_path: None,
            raw_time: false,
        }
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| Error::config(key, format!("'{value}' is not a number")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize> {
    value
        .parse::<usize>()
        .map_err(|_| Error::config(key, format!("'{value}' is not a non-negative integer")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(Error::config(key, format!("'{other}' is not a boolean"))),
    }
}

/// Parse a comma-separated list of measurement counts, e.g. `1,2,4,8`.
pub fn parse_n_list(value: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for piece in value.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        out.push(parse_usize("n", piece)?);
    }
    if out.is_empty() {
        return Err(Error::config("n", "expected at least one count"));
    }
    Ok(out)
}

impl ExperimentConfig {
    /// Apply one `key = value` assignment. Shared by the file parser and
    /// the flag-override path.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "omega01" => self.omega01 = parse_f64(key, value)?,
            "omega12" => self.omega12 = parse_f64(key, value)?,
            "phi01" => self.phi01 = parse_f64(key, value)?,
            "phi12" => self.phi12 = parse_f64(key, value)?,
            "projector" => {
                self.projector = value
                    .parse::<ProjectorKind>()
                    .map_err(|_| Error::config(key, format!("unknown kind '{value}'")))?
            }
            "n" => self.n_values = parse_n_list(value)?,
            "mode" => self.mode = value.parse::<Mode>()?,
            "weight" => self.weight = parse_f64(key, value)?,
            "width" => self.width = parse_f64(key, value)?,
            "grid" => self.grid_points = parse_usize(key, value)?,
            "tau_max" => self.tau_max = parse_f64(key, value)?,
            "epsilon" => self.epsilon = parse_f64(key, value)?,
            "step" => self.step = Some(parse_f64(key, value)?),
            "csv" => self.csv_dir = Some(PathBuf::from(value)),
            "svg" => self.svg_path = Some(PathBuf::from(value)),
            "report" => self.report_path = Some(PathBuf::from(value)),
            "raw_time" => self.raw_time = parse_bool(key, value)?,
            other => {
                return Err(Error::config(other, "unknown key"));
            }
        }
        Ok(())
    }

    /// Load a config file on top of the defaults.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut config = ExperimentConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(
                    format!("line {}", lineno + 1),
                    "expected 'key = value'",
                )
            })?;
            config.apply(key.trim(), value.trim())?;
        }
        Ok(config)
    }

    /// Check every field constraint. Counts are sorted and deduplicated so
    /// report and file ordering is well defined.
    pub fn validate(&mut self) -> Result<()> {
        for (name, v) in [
            ("omega01", self.omega01),
            ("omega12", self.omega12),
            ("phi01", self.phi01),
            ("phi12", self.phi12),
        ] {
            if !v.is_finite() {
                return Err(Error::config(name, "must be finite"));
            }
        }
        if self.omega01 < 0.0 || self.omega12 < 0.0 {
            return Err(Error::config(
                "omega01/omega12",
                "Rabi frequencies must be non-negative",
            ));
        }
        if self.omega01 == 0.0 && self.omega12 == 0.0 {
            return Err(Error::config(
                "omega01/omega12",
                "at least one Rabi frequency must be positive",
            ));
        }
        if self.grid_points < 2 {
            return Err(Error::config("grid", "need at least 2 grid points"));
        }
        if !self.tau_max.is_finite() || self.tau_max <= 0.0 {
            return Err(Error::config("tau_max", "must be positive and finite"));
        }
        if self.n_values.is_empty() && self.mode != Mode::Free {
            return Err(Error::config("n", "need at least one measurement count"));
        }
        if self.n_values.iter().any(|&n| n < 1) {
            return Err(Error::config("n", "counts must be at least 1"));
        }
        if !self.weight.is_finite() || self.weight <= 0.0 {
            return Err(Error::config("weight", "must be positive and finite"));
        }
        if !self.width.is_finite() || self.width <= 0.0 {
            return Err(Error::config("width", "must be positive and finite"));
        }
        if !self.epsilon.is_finite() || self.epsilon <= 0.0 {
            return Err(Error::config("epsilon", "must be positive and finite"));
        }
        if let Some(step) = self.step {
            if !step.is_finite() || step <= 0.0 {
                return Err(Error::config("step", "must be positive and finite"));
            }
        }
        self.n_values.sort_unstable();
        self.n_values.dedup();
        Ok(())
    }

    /// The τ grid implied by `grid_points` and `tau_max`.
    pub fn grid(&self) -> Vec<f64> {
        let last = (self.grid_points - 1) as f64;
        (0..self.grid_points)
            .map(|i| self.tau_max * i as f64 / last)
            .collect()
    }
}
