//! `simulate` run configuration (JSON, schema `chlab.run/v1`).

use std::path::{Path, PathBuf};

use chlab_core::sim::{DetectorModel, SourceConfig};
use chlab_core::SettingsQuad;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const RUN_SCHEMA: &str = "chlab.run/v1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadDegrees {
    pub theta1: f64,
    pub theta1_prime: f64,
    pub theta2: f64,
    pub theta2_prime: f64,
}

impl QuadDegrees {
    pub fn to_quad(self) -> SettingsQuad {
        SettingsQuad::from_degrees(self.theta1, self.theta1_prime, self.theta2, self.theta2_prime)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    /// Where to write the counts JSON document.
    #[serde(default)]
    pub counts: Option<PathBuf>,
    /// Directory for the six event CSVs and their metadata sidecars.
    #[serde(default)]
    pub events_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: String,
    pub source: SourceConfig,
    pub detector: DetectorModel,
    pub settings_deg: QuadDegrees,
    /// Full coincidence window, seconds.
    pub window_s: f64,
    pub seed: u64,
    #[serde(default)]
    pub output: OutputPaths,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema != RUN_SCHEMA {
            return Err(CliError::Config(format!(
                "schema must be \"{RUN_SCHEMA}\", got \"{}\"",
                self.schema
            )));
        }
        let conf = |e: chlab_core::Error| CliError::Config(e.to_string());
        self.source.validate().map_err(conf)?;
        self.detector.validate().map_err(conf)?;
        let q = self.settings_deg;
        if ![q.theta1, q.theta1_prime, q.theta2, q.theta2_prime].iter().all(|t| t.is_finite()) {
            return Err(CliError::Config("settings_deg angles must be finite".into()));
        }
        if !(self.window_s > 0.0 && self.window_s.is_finite()) {
            return Err(CliError::Config(format!("window_s must be > 0, got {}", self.window_s)));
        }
        Ok(())
    }
}
