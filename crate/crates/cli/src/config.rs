//! JSON configuration: measure and pin specifications, experiment settings,
//! and the hypothesis checks that gate each experiment.

use std::path::Path;

use pinned_core::generate::{cantor_measure, circle, segment, uniform_grid};
use pinned_core::rng;
use pinned_core::Measure;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::checks::CheckSpec;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] pinned_core::Error),
}

/// How to build a measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case")]
pub enum MeasureSpec {
    Cantor {
        dim: usize,
        ratio: f64,
        depth: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        branch_weights: Option<[f64; 2]>,
    },
    Uniform { lo: Vec<f64>, hi: Vec<f64>, per_axis: usize },
    Segment { a: Vec<f64>, b: Vec<f64>, n: usize },
    Circle { center: Vec<f64>, radius: f64, n: usize },
    Atoms { points: Vec<Vec<f64>>, weights: Vec<f64> },
    File { path: String },
    /// `offset + scale * p` applied to another measure.
    Affine { scale: f64, offset: Vec<f64>, base: Box<MeasureSpec> },
}

impl MeasureSpec {
    pub fn build(&self) -> Result<Measure, ConfigError> {
        Ok(match self {
            MeasureSpec::Cantor { dim, ratio, depth, branch_weights } => {
                cantor_measure(*dim, *ratio, *depth, *branch_weights)?
            }
            MeasureSpec::Uniform { lo, hi, per_axis } => uniform_grid(lo, hi, *per_axis)?,
            MeasureSpec::Segment { a, b, n } => segment(a, b, *n)?,
            MeasureSpec::Circle { center, radius, n } => circle(center, *radius, *n)?,
            MeasureSpec::Atoms { points, weights } => {
                let dim = points.first().map_or(0, Vec::len);
                Measure::new(dim, points.clone(), weights.clone())?
            }
            MeasureSpec::File { path } => {
                let text = read(Path::new(path))?;
                if path.ends_with(".csv") {
                    Measure::read_csv(text.as_bytes())?
                } else {
                    Measure::from_json(&text)?
                }
            }
            MeasureSpec::Affine { scale, offset, base } => base.build()?.transformed(*scale, offset)?,
        })
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            MeasureSpec::Cantor { dim, .. } => Some(*dim),
            MeasureSpec::Uniform { lo, .. } => Some(lo.len()),
            MeasureSpec::Segment { a, .. } => Some(a.len()),
            MeasureSpec::Circle { center, .. } => Some(center.len()),
            MeasureSpec::Atoms { points, .. } => points.first().map(Vec::len),
            MeasureSpec::File { .. } => None,
            MeasureSpec::Affine { base, .. } => base.dim(),
        }
    }
}

/// Where pins come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum PinSource {
    /// Cell centres of a regular grid on a box.
    Grid { lo: Vec<f64>, hi: Vec<f64>, per_axis: usize },
    /// Seeded uniform samples of a box.
    Lebesgue { lo: Vec<f64>, hi: Vec<f64>, count: usize },
    /// Seeded draws from a measure, in proportion to its weights.
    Measure { measure: MeasureSpec, count: usize },
}

impl PinSource {
    pub fn dim(&self) -> Option<usize> {
        match self {
            PinSource::Grid { lo, .. } | PinSource::Lebesgue { lo, .. } => Some(lo.len()),
            PinSource::Measure { measure, .. } => measure.dim(),
        }
    }

    pub fn pins(&self, seed: u64) -> Result<Vec<Vec<f64>>, ConfigError> {
        match self {
            PinSource::Grid { lo, hi, per_axis } => Ok(uniform_grid(lo, hi, *per_axis)?.points().map(<[f64]>::to_vec).collect()),
            PinSource::Lebesgue { lo, hi, count } => {
                if lo.len() != hi.len() || lo.is_empty() {
                    return Err(ConfigError::Invalid("pin box bounds differ in dimension".into()));
                }
                let mut g = rng::stream(seed, 0);
                Ok((0..*count)
                    .map(|_| lo.iter().zip(hi).map(|(&a, &b)| a + (b - a) * rng::uniform::<f64, _>(&mut g)).collect())
                    .collect())
            }
            PinSource::Measure { measure, count } => {
                let mu = measure.build()?;
                let all = pinned_core::Region::All;
                Ok(pinned_core::selection::iid_select(&mu, &all, *count, seed)?)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Thm2,
    Thm4a,
    Thm4b,
    Checks,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pins: Option<PinSource>,
    /// Target dimension of the measure's support.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Distance-set threshold; for `thm2` it defaults to the middle of the admissible window.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    /// Largest admissible gap between the audited and the target dimension.
    #[serde(default = "default_audit_tolerance")]
    pub audit_tolerance: f64,
    /// A pin passes when its estimate is at least `threshold - margin`.
    #[serde(default = "default_margin")]
    pub margin: f64,
    /// Admissible share of failing pins.
    #[serde(default = "default_fail_share")]
    pub max_fail_share: f64,
    /// Nested pin grids (cells per axis) for the exceptional-set estimate.
    #[serde(default)]
    pub exceptional_grids: Vec<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
}

fn default_audit_tolerance() -> f64 {
    0.1
}

fn default_margin() -> f64 {
    0.1
}

fn default_fail_share() -> f64 {
    0.05
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(&read(path)?)?)
    }

    pub fn ambient_dim(&self) -> Result<usize, ConfigError> {
        self.measure
            .as_ref()
            .and_then(MeasureSpec::dim)
            .or_else(|| self.pins.as_ref().and_then(PinSource::dim))
            .ok_or_else(|| ConfigError::Invalid("cannot infer the ambient dimension".into()))
    }

    /// Checks the experiment's hypotheses; equality counts as a violation.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.experiment == ExperimentKind::Checks {
            return Ok(());
        }
        if self.measure.is_none() || self.pins.is_none() {
            return Err(ConfigError::Invalid("experiments need a measure and a pin source".into()));
        }
        let beta = self.beta.ok_or_else(|| ConfigError::Invalid("beta is required".into()))?;
        let d = self.ambient_dim()?;
        if self.pins.as_ref().and_then(PinSource::dim).is_some_and(|p| p != d) {
            return Err(ConfigError::Invalid("pins and measure live in different dimensions".into()));
        }
        validate_hypothesis(self.experiment, d, beta, self.tau)
    }

    /// The distance-set dimension the experiment compares against.
    pub fn threshold(&self) -> Result<f64, ConfigError> {
        let beta = self.beta.ok_or_else(|| ConfigError::Invalid("beta is required".into()))?;
        let d = self.ambient_dim()? as f64;
        Ok(match self.experiment {
            ExperimentKind::Thm2 => match self.tau {
                Some(t) => t,
                None => tau_window(d as usize, beta).map(|(a, b)| 0.5 * (a + b))?,
            },
            ExperimentKind::Thm4a => (2.0 * beta - 1.0) / 3.0,
            ExperimentKind::Thm4b => (beta + 2.0 - d) / 2.0,
            ExperimentKind::Checks => 0.0,
        })
    }
}

/// Open interval of `tau` with `2 tau + (d - 1)/2 < beta < 2 tau + d - 1`.
pub fn tau_window(d: usize, beta: f64) -> Result<(f64, f64), ConfigError> {
    let d = d as f64;
    let lo = ((beta - (d - 1.0)) / 2.0).max(0.0);
    let hi = (beta - (d - 1.0) / 2.0) / 2.0;
    if lo < hi {
        Ok((lo, hi))
    } else {
        Err(ConfigError::Hypothesis(format!("no admissible tau for beta = {beta} in dimension {d}")))
    }
}

pub fn validate_hypothesis(kind: ExperimentKind, d: usize, beta: f64, tau: Option<f64>) -> Result<(), ConfigError> {
    let df = d as f64;
    if !(beta > 0.0 && beta <= df) {
        return Err(ConfigError::Invalid(format!("beta = {beta} outside (0, {d}]")));
    }
    match kind {
        ExperimentKind::Thm2 => {
            if d < 2 {
                return Err(ConfigError::Invalid("thm2 needs d >= 2".into()));
            }
            if let Some(t) = tau {
                let low = 2.0 * t + (df - 1.0) / 2.0;
                let high = 2.0 * t + df - 1.0;
                if !(low < beta && beta < high) {
                    return Err(ConfigError::Hypothesis(format!(
                        "thm2 needs 2 tau + (d - 1)/2 < beta < 2 tau + d - 1, got {low} < {beta} < {high}"
                    )));
                }
            } else {
                tau_window(d, beta)?;
            }
        }
        ExperimentKind::Thm4a => {
            if d != 2 {
                return Err(ConfigError::Invalid("thm4a is planar".into()));
            }
            if !(beta > 0.5) {
                return Err(ConfigError::Hypothesis(format!("thm4a needs beta > 1/2, got {beta}")));
            }
        }
        ExperimentKind::Thm4b => {
            if d < 3 {
                return Err(ConfigError::Invalid("thm4b needs d >= 3".into()));
            }
            if !(beta > df - 2.0) {
                return Err(ConfigError::Hypothesis(format!("thm4b needs beta > d - 2 = {}, got {beta}", df - 2.0)));
            }
        }
        ExperimentKind::Checks => {}
    }
    Ok(())
}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.display().to_string(), source })
}
