//! Run configuration: JSON schemas for the deformation grid, operator
//! tuples, tolerances, and output selection shared by the CLI verbs.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::piece::OperatorTuple;
use crate::qcoeff::QParams;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("could not read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("could not parse {path}: {source}")]
    Parse { path: String, source: serde_json::Error },
}

/// JSON form of the deformation grid: either a uniform phase
/// `{"n": 2, "mode": "uniform", "theta": 1.57}` applied to every pair
/// `i < j`, or the full row-major entry list
/// `{"n": 2, "mode": "matrix", "entries": [[re, im], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QSpec {
    pub n: usize,
    pub mode: QMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QMode {
    Uniform,
    Matrix,
}

impl QSpec {
    pub fn uniform(n: usize, theta: f64) -> Self {
        QSpec { n, mode: QMode::Uniform, theta: Some(theta), entries: None }
    }

    pub fn to_params(&self) -> Result<QParams, ConfigError> {
        if self.n == 0 {
            return Err(ConfigError::Invalid("n must be at least 1".to_string()));
        }
        match self.mode {
            QMode::Uniform => {
                let theta = self
                    .theta
                    .ok_or_else(|| ConfigError::Invalid("uniform mode needs theta".to_string()))?;
                if !theta.is_finite() {
                    return Err(ConfigError::Invalid("theta must be finite".to_string()));
                }
                Ok(QParams::uniform_theta(self.n, theta))
            }
            QMode::Matrix => {
                let entries = self
                    .entries
                    .as_ref()
                    .ok_or_else(|| ConfigError::Invalid("matrix mode needs entries".to_string()))?;
                if entries.len() != self.n * self.n {
                    return Err(ConfigError::Invalid(format!(
                        "expected {} entries, got {}",
                        self.n * self.n,
                        entries.len()
                    )));
                }
                let grid: Vec<C64> = entries.iter().map(|[re, im]| C64::new(*re, *im)).collect();
                QParams::from_matrix(self.n, grid)
                    .map_err(|e| ConfigError::Invalid(e.to_string()))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// One fully resolved run: the deformation grid, the truncation level,
/// tolerances, and optionally a concrete operator tuple.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub q: QSpec,
    /// Fock truncation level M
    pub level: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_eps_tail")]
    pub eps_tail: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// longest word used in moment/compression sweeps
    #[serde(default = "default_word_cap")]
    pub word_cap: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuple: Option<OperatorTuple>,
    #[serde(default = "default_format")]
    pub format: OutputFormat,
}

fn default_tol() -> f64 {
    1e-10
}
fn default_eps_tail() -> f64 {
    1e-6
}
fn default_seed() -> u64 {
    7
}
fn default_word_cap() -> usize {
    4
}
fn default_format() -> OutputFormat {
    OutputFormat::Json
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.q.n == 0 {
            return Err(ConfigError::Invalid("n must be at least 1".to_string()));
        }
        if self.tol <= 0.0 || self.eps_tail <= 0.0 {
            return Err(ConfigError::Invalid("tolerances must be positive".to_string()));
        }
        self.q.to_params()?;
        if let Some(t) = &self.tuple {
            if t.n != self.q.n {
                return Err(ConfigError::Invalid(format!(
                    "tuple has {} operators but the grid is {}x{}",
                    t.n, self.q.n, self.q.n
                )));
            }
        }
        Ok(())
    }

    pub fn from_path(path: &str) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.to_string(), source })?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|source| ConfigError::Parse { path: path.to_string(), source })?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Loads an operator tuple from its JSON dump.
pub fn tuple_from_path(path: &str) -> Result<OperatorTuple, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ConfigError::Io { path: path.to_string(), source })?;
    serde_json::from_str(&text)
        .map_err(|source| ConfigError::Parse { path: path.to_string(), source })
}
