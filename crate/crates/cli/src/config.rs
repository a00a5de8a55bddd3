//! JSON scenario files.
//!
//! A config file is one flat object; every key is optional and falls back to
//! the reference scenario. An empty file is the reference scenario. The
//! accepted keys are published as a JSON Schema in `config.schema.json`.

use sbrsma_core::linklevel::PowerSplit;
use sbrsma_core::scenario::db_to_linear;
use sbrsma_core::ScenarioConfig;
use serde::Deserialize;
use std::path::{Path, PathBuf};

pub const SCHEMA: &str = include_str!("../config.schema.json");

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid config at `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("invalid scenario")]
    Scenario(#[from] sbrsma_core::Error),
}

/// On-disk representation; names follow the usual notation.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(rename = "L")]
    pub antennas: Option<usize>,
    pub lambda0: Option<f64>,
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub omega1: Option<f64>,
    pub omega2: Option<f64>,
    pub eta: Option<f64>,
    pub alpha_c: Option<f64>,
    pub alpha_1: Option<f64>,
    pub alpha_2: Option<f64>,
    #[serde(rename = "Rc")]
    pub rc: Option<f64>,
    #[serde(rename = "R1")]
    pub r1: Option<f64>,
    #[serde(rename = "R2")]
    pub r2: Option<f64>,
    #[serde(rename = "Rb")]
    pub rb: Option<f64>,
    #[serde(rename = "Psi_dB")]
    pub psi_db: Option<f64>,
}

impl ConfigFile {
    /// Overlays the set fields on `base` and validates the result.
    pub fn apply(&self, base: &ScenarioConfig) -> Result<ScenarioConfig, ConfigError> {
        let mut c = *base;
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        if let Some(l) = self.antennas {
            c.antennas = l;
        }
        set(&mut c.fading.lambda0, self.lambda0);
        set(&mut c.fading.lambda1, self.lambda1);
        set(&mut c.fading.lambda2, self.lambda2);
        set(&mut c.fading.omega1, self.omega1);
        set(&mut c.fading.omega2, self.omega2);
        set(&mut c.eta, self.eta);
        c.power = PowerSplit::new(
            self.alpha_c.unwrap_or(c.power.alpha_c),
            self.alpha_1.unwrap_or(c.power.alpha_1),
            self.alpha_2.unwrap_or(c.power.alpha_2),
        )?;
        set(&mut c.rates.rc, self.rc);
        set(&mut c.rates.r1, self.r1);
        set(&mut c.rates.r2, self.r2);
        set(&mut c.rates.rb, self.rb);
        if let Some(db) = self.psi_db {
            c.psi = db_to_linear(db);
        }
        c.validate()?;
        Ok(c)
    }
}

/// Parses config text; blank input yields the reference scenario.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    if text.trim().is_empty() {
        return Ok(ScenarioConfig::default());
    }
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: ConfigFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        ConfigError::Schema { field, message: e.into_inner().to_string() }
    })?;
    file.apply(&ScenarioConfig::default())
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_owned(), source })?;
    parse_config(&text)
}
