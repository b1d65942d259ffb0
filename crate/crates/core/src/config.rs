//! Experiment configuration shared by `train` and `verify`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::data::DEFAULT_TRAIN_FRACTION;
use crate::verify::{VerifyParams, DEFAULT_NUM_POINTS};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config is not valid JSON: {0}")]
    Syntax(String),
    #[error("config must be a JSON object")]
    NotObject,
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("config key `{key}`: {message}")]
    Invalid { key: String, message: String },
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Config {
    pub model: Option<PathBuf>,
    pub data: Option<PathBuf>,
    pub num_points: usize,
    pub eps_init: f64,
    pub max_clique: usize,
    pub max_search: usize,
    pub max_level: usize,
    /// 0 or 1.
    pub dp: u8,
    pub seed: u64,
    pub train_fraction: f64,
}

impl Default for Config {
    fn default() -> Self {
        let v = VerifyParams::default();
        Config {
            model: None,
            data: None,
            num_points: DEFAULT_NUM_POINTS,
            eps_init: v.eps_init,
            max_clique: v.max_clique,
            max_search: v.max_search,
            max_level: v.max_level,
            dp: u8::from(v.dp),
            seed: 0,
            train_fraction: DEFAULT_TRAIN_FRACTION,
        }
    }
}

fn field<T: DeserializeOwned>(key: &str, value: Value) -> Result<T, ConfigError> {
    serde_json::from_value(value).map_err(|e| invalid(key, e.to_string()))
}

impl Config {
    /// Parses a config document. Relative `model`/`data` paths are resolved
    /// against `base_dir`.
    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let doc: Value = serde_json::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
        let Value::Object(map) = doc else {
            return Err(ConfigError::NotObject);
        };
        let mut cfg = Config::default();
        for (key, value) in map {
            let k = key.as_str();
            match k {
                "model" => cfg.model = Some(base_dir.join(field::<PathBuf>(k, value)?)),
                "data" => cfg.data = Some(base_dir.join(field::<PathBuf>(k, value)?)),
                "num_points" => cfg.num_points = field(k, value)?,
                "eps_init" => cfg.eps_init = field(k, value)?,
                "max_clique" => cfg.max_clique = field(k, value)?,
                "max_search" => cfg.max_search = field(k, value)?,
                "max_level" => cfg.max_level = field(k, value)?,
                "dp" => cfg.dp = field(k, value)?,
                "seed" => cfg.seed = field(k, value)?,
                "train_fraction" => cfg.train_fraction = field(k, value)?,
                _ => return Err(ConfigError::UnknownKey(key)),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::from_json(&text, base)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.num_points < 1 {
            return Err(invalid("num_points", "must be at least 1"));
        }
        if !(self.eps_init > 0.0 && self.eps_init.is_finite()) {
            return Err(invalid("eps_init", "must be a positive finite number"));
        }
        if self.max_clique < 2 {
            return Err(invalid("max_clique", "must be at least 2"));
        }
        if self.max_search < 1 {
            return Err(invalid("max_search", "must be at least 1"));
        }
        if self.max_level < 1 {
            return Err(invalid("max_level", "must be at least 1"));
        }
        if self.dp > 1 {
            return Err(invalid("dp", "must be 0 or 1"));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(invalid("train_fraction", "must lie strictly between 0 and 1"));
        }
        Ok(())
    }

    pub fn verify_params(&self) -> VerifyParams {
        VerifyParams {
            eps_init: self.eps_init,
            max_search: self.max_search,
            max_level: self.max_level,
            max_clique: self.max_clique,
            dp: self.dp == 1,
        }
    }
}
