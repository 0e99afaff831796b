//! Flat run configuration: defaults, then a config file, then command-line
//! overrides, each key remembering where its value came from.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::autoencoder::{ModelKind, TrainConfig};
use crate::cluster::EpsRule;
use crate::error::{Error, Result};
use crate::features::{FeatureConfig, SdConvention};
use crate::nn::Loss;
use crate::rri::{CleanConfig, ScalingMode};

/// Which autoencoders a run trains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSelection {
    Cae,
    Lae,
    Both,
}

impl ModelSelection {
    pub fn models(self) -> Vec<ModelKind> {
        match self {
            ModelSelection::Cae => vec![ModelKind::Cae],
            ModelSelection::Lae => vec![ModelKind::Lae],
            ModelSelection::Both => vec![ModelKind::Cae, ModelKind::Lae],
        }
    }
}

impl FromStr for ModelSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cae" => Ok(ModelSelection::Cae),
            "lae" => Ok(ModelSelection::Lae),
            "both" => Ok(ModelSelection::Both),
            _ => Err(Error::Config(format!("model must be cae, lae or both, got `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: PathBuf,
    pub out: PathBuf,
    pub seed: u64,
    pub model: ModelSelection,
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub loss: Loss,
    pub scaling: ScalingMode,
    pub clean_min_ms: f64,
    pub clean_max_ms: f64,
    pub clean_max_rel_change: f64,
    pub sdnn: SdConvention,
    pub kmeans_n_init: usize,
    pub min_pts: usize,
    pub eps: EpsRule,
    pub knn_k: usize,
    pub significance: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let train = TrainConfig::default();
        let clean = CleanConfig::default();
        Self {
            input: PathBuf::from("cohort"),
            out: PathBuf::from("runs"),
            seed: 42,
            model: ModelSelection::Both,
            epochs: train.epochs,
            batch_size: train.batch_size,
            lr: train.lr,
            loss: train.loss,
            scaling: ScalingMode::PerWindow,
            clean_min_ms: clean.min_ms,
            clean_max_ms: clean.max_ms,
            clean_max_rel_change: clean.max_rel_change,
            sdnn: SdConvention::Population,
            kmeans_n_init: 10,
            min_pts: 5,
            eps: EpsRule::default(),
            knn_k: 5,
            significance: crate::analysis::DEFAULT_SIGNIFICANCE,
        }
    }
}

/// Every key accepted by [`RunConfig::set`].
pub const CONFIG_KEYS: &[&str] = &[
    "input",
    "out",
    "seed",
    "model",
    "epochs",
    "batch_size",
    "lr",
    "loss",
    "scaling",
    "clean_min_ms",
    "clean_max_ms",
    "clean_max_rel_change",
    "sdnn",
    "kmeans_n_init",
    "min_pts",
    "eps",
    "knn_k",
    "significance",
];

fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{value}`")))
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "input" => self.input = PathBuf::from(value),
            "out" => self.out = PathBuf::from(value),
            "seed" => self.seed = num(key, value)?,
            "model" => self.model = value.parse()?,
            "epochs" => self.epochs = num(key, value)?,
            "batch_size" => self.batch_size = num(key, value)?,
            "lr" => self.lr = num(key, value)?,
            "loss" => {
                self.loss = match value {
                    "mae" => Loss::Mae,
                    "mse" => Loss::Mse,
                    _ => return Err(Error::Config(format!("loss must be mae or mse, got `{value}`"))),
                }
            }
            "scaling" => {
                self.scaling = match value {
                    "per_window" => ScalingMode::PerWindow,
                    "global" => ScalingMode::Global,
                    _ => {
                        return Err(Error::Config(format!(
                            "scaling must be per_window or global, got `{value}`"
                        )))
                    }
                }
            }
            "clean_min_ms" => self.clean_min_ms = num(key, value)?,
            "clean_max_ms" => self.clean_max_ms = num(key, value)?,
            "clean_max_rel_change" => self.clean_max_rel_change = num(key, value)?,
            "sdnn" => {
                self.sdnn = match value {
                    "population" => SdConvention::Population,
                    "sample" => SdConvention::Sample,
                    _ => {
                        return Err(Error::Config(format!(
                            "sdnn must be population or sample, got `{value}`"
                        )))
                    }
                }
            }
            "kmeans_n_init" => self.kmeans_n_init = num(key, value)?,
            "min_pts" => self.min_pts = num(key, value)?,
            "eps" => self.eps = value.parse()?,
            "knn_k" => self.knn_k = num(key, value)?,
            "significance" => self.significance = num(key, value)?,
            _ => return Err(Error::Config(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.batch_size == 0 {
            return bad("batch_size must be positive".into());
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return bad(format!("lr must be positive, got {}", self.lr));
        }
        if self.min_pts < 2 {
            return bad(format!("min_pts must be >= 2, got {}", self.min_pts));
        }
        if self.knn_k == 0 || self.knn_k.is_multiple_of(2) {
            return bad(format!("knn_k must be odd, got {}", self.knn_k));
        }
        if !(self.significance > 0.0 && self.significance < 1.0) {
            return bad(format!("significance must be in (0, 1), got {}", self.significance));
        }
        if !(self.clean_min_ms > 0.0 && self.clean_min_ms < self.clean_max_ms) {
            return bad("clean_min_ms must be positive and below clean_max_ms".into());
        }
        if !(self.clean_max_rel_change > 0.0) {
            return bad("clean_max_rel_change must be positive".into());
        }
        Ok(())
    }

    pub fn clean(&self) -> CleanConfig {
        CleanConfig {
            min_ms: self.clean_min_ms,
            max_ms: self.clean_max_ms,
            max_rel_change: self.clean_max_rel_change,
        }
    }

    pub fn features(&self) -> FeatureConfig {
        FeatureConfig {
            sdnn: self.sdnn,
            ..FeatureConfig::default()
        }
    }

    pub fn train(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            batch_size: self.batch_size,
            lr: self.lr,
            loss: self.loss,
            seed,
        }
    }

    /// `<out>/seed-<seed>`.
    pub fn run_dir(&self) -> PathBuf {
        self.out.join(format!("seed-{}", self.seed))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Default,
    File,
    Cli,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Default => "default",
            Source::File => "file",
            Source::Cli => "cli",
        })
    }
}

/// A config together with the origin of every key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub config: RunConfig,
    pub sources: BTreeMap<String, Source>,
}

/// Reads `key = value` lines (`#` comments allowed) or a flat JSON object.
pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if text.trim_start().starts_with('{') {
        let map: BTreeMap<String, serde_json::Value> = serde_json::from_str(&text)?;
        return map
            .into_iter()
            .map(|(k, v)| match v {
                serde_json::Value::String(s) => Ok((k, s)),
                serde_json::Value::Number(n) => Ok((k, n.to_string())),
                serde_json::Value::Bool(b) => Ok((k, b.to_string())),
                other => Err(Error::Config(format!("`{k}`: unsupported value {other}"))),
            })
            .collect();
    }
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("expected `key = value`, got `{line}`"),
        })?;
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(pairs)
}

/// Applies defaults, then `file` (if any), then `overrides`; later layers win.
pub fn resolve(file: Option<&Path>, overrides: &[(String, String)]) -> Result<ResolvedConfig> {
    let mut config = RunConfig::default();
    let mut sources: BTreeMap<String, Source> = CONFIG_KEYS
        .iter()
        .map(|k| (k.to_string(), Source::Default))
        .collect();
    if let Some(path) = file {
        for (k, v) in read_config_file(path)? {
            config.set(&k, &v)?;
            sources.insert(k, Source::File);
        }
    }
    for (k, v) in overrides {
        config.set(k, v)?;
        sources.insert(k.clone(), Source::Cli);
    }
    config.validate()?;
    Ok(ResolvedConfig { config, sources })
}
