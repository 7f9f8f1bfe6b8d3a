use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::model::TrainConfig;
use crate::preprocess::{ContextMode, UndersampleConfig, DEFAULT_FEATURE_DIM};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(String),
    #[error("config field {field}: path {path} does not exist")]
    MissingPath { field: &'static str, path: PathBuf },
    #[error("config field {0} is required for this command")]
    MissingField(&'static str),
    #[error("strategy set is empty")]
    EmptyStrategies,
    #[error("unknown strategy component {0:?}")]
    UnknownStrategy(String),
    #[error("invalid strategy {0:?}: {1}")]
    InvalidStrategy(String, &'static str),
    #[error("feature_dim must be a power of two, got {0}")]
    FeatureDim(usize),
    #[error("evaluation set is empty; metrics are undefined")]
    EmptyEvaluationSet,
}

/// One arm of the strategy matrix.
///
/// Written as `baseline` or a `+`-joined set of `undersample`,
/// `context_sentence` / `context_subsentence` and `cost_sensitive`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Strategy {
    pub undersample: bool,
    pub context: ContextMode,
    pub cost_sensitive: bool,
}

impl Strategy {
    pub const BASELINE: Strategy = Strategy {
        undersample: false,
        context: ContextMode::None,
        cost_sensitive: false,
    };

    /// Number of techniques combined in this arm.
    pub fn technique_count(&self) -> usize {
        self.undersample as usize + (self.context != ContextMode::None) as usize + self.cost_sensitive as usize
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.undersample {
            parts.push("undersample");
        }
        match self.context {
            ContextMode::None => {}
            ContextMode::Sentence => parts.push("context_sentence"),
            ContextMode::Subsentence => parts.push("context_subsentence"),
        }
        if self.cost_sensitive {
            parts.push("cost_sensitive");
        }
        if parts.is_empty() {
            f.write_str("baseline")
        } else {
            f.write_str(&parts.join("+"))
        }
    }
}

impl FromStr for Strategy {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim() == "baseline" {
            return Ok(Strategy::BASELINE);
        }
        let mut out = Strategy::BASELINE;
        for part in s.split('+').map(str::trim) {
            let dup = match part {
                "undersample" => std::mem::replace(&mut out.undersample, true),
                "cost_sensitive" => std::mem::replace(&mut out.cost_sensitive, true),
                "context_sentence" | "context_subsentence" => {
                    if out.context != ContextMode::None {
                        return Err(ConfigError::InvalidStrategy(
                            s.into(),
                            "at most one context mode per arm",
                        ));
                    }
                    out.context = if part == "context_sentence" {
                        ContextMode::Sentence
                    } else {
                        ContextMode::Subsentence
                    };
                    false
                }
                "baseline" => {
                    return Err(ConfigError::InvalidStrategy(
                        s.into(),
                        "baseline cannot be combined",
                    ))
                }
                other => return Err(ConfigError::UnknownStrategy(other.into())),
            };
            if dup {
                return Err(ConfigError::InvalidStrategy(s.into(), "repeated component"));
            }
        }
        Ok(out)
    }
}

impl Serialize for Strategy {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Strategy {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Which splits context expansion applies to, and whether the span is
/// marked inside the window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContextOptions {
    pub train: bool,
    pub dev: bool,
    pub mark_span: bool,
}

impl Default for ContextOptions {
    fn default() -> Self {
        ContextOptions {
            train: true,
            dev: true,
            mark_span: false,
        }
    }
}

fn default_strategies() -> Vec<Strategy> {
    vec![Strategy::BASELINE]
}

fn default_feature_dim() -> usize {
    DEFAULT_FEATURE_DIM
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// The JSON experiment document. Relative paths are resolved against the
/// directory containing the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub articles_dir: PathBuf,
    pub train_labels: PathBuf,
    #[serde(default)]
    pub dev_labels: Option<PathBuf>,
    /// Label-set manifest; the built-in fourteen-class set when absent.
    #[serde(default)]
    pub manifest: Option<PathBuf>,
    #[serde(default = "default_strategies")]
    pub strategies: Vec<Strategy>,
    #[serde(default)]
    pub undersample: UndersampleConfig,
    #[serde(default)]
    pub context: ContextOptions,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default = "default_feature_dim")]
    pub feature_dim: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// When set, replaces both the training and the undersampling seed.
    #[serde(default)]
    pub seed: Option<u64>,
}

impl ExperimentConfig {
    pub fn from_json(json: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(json).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    /// Read a config file and resolve relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = ExperimentConfig::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.articles_dir);
        fix(&mut self.train_labels);
        fix(&mut self.output_dir);
        if let Some(p) = self.dev_labels.as_mut() {
            fix(p);
        }
        if let Some(p) = self.manifest.as_mut() {
            fix(p);
        }
    }

    pub fn train_seed(&self) -> u64 {
        self.seed.unwrap_or(self.train.seed)
    }

    pub fn undersample_seed(&self) -> u64 {
        self.seed.unwrap_or(self.undersample.seed)
    }

    pub fn effective_train_config(&self) -> TrainConfig {
        TrainConfig {
            seed: self.train_seed(),
            ..self.train.clone()
        }
    }

    /// Check referenced paths and basic invariants.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let check = |field: &'static str, p: &Path| {
            if p.exists() {
                Ok(())
            } else {
                Err(ConfigError::MissingPath {
                    field,
                    path: p.to_path_buf(),
                })
            }
        };
        check("articles_dir", &self.articles_dir)?;
        check("train_labels", &self.train_labels)?;
        if let Some(p) = &self.dev_labels {
            check("dev_labels", p)?;
        }
        if let Some(p) = &self.manifest {
            check("manifest", p)?;
        }
        if self.strategies.is_empty() {
            return Err(ConfigError::EmptyStrategies);
        }
        for (i, s) in self.strategies.iter().enumerate() {
            if self.strategies[..i].contains(s) {
                return Err(ConfigError::InvalidStrategy(s.to_string(), "listed twice"));
            }
        }
        if !self.feature_dim.is_power_of_two() || self.feature_dim > 1 << 32 {
            return Err(ConfigError::FeatureDim(self.feature_dim));
        }
        self.train
            .validate()
            .map_err(|e| ConfigError::Parse(e.to_string()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategy_names_round_trip() {
        for s in [
            "baseline",
            "undersample",
            "cost_sensitive",
            "context_sentence",
            "context_subsentence",
            "undersample+cost_sensitive",
            "undersample+context_sentence+cost_sensitive",
        ] {
            assert_eq!(s.parse::<Strategy>().unwrap().to_string(), s);
        }
        // components are canonicalized into a fixed order
        assert_eq!(
            "cost_sensitive+undersample".parse::<Strategy>().unwrap().to_string(),
            "undersample+cost_sensitive"
        );
    }

    #[test]
    fn bad_strategies() {
        assert!(matches!("oversample".parse::<Strategy>(), Err(ConfigError::UnknownStrategy(_))));
        assert!("baseline+undersample".parse::<Strategy>().is_err());
        assert!("context_sentence+context_subsentence".parse::<Strategy>().is_err());
        assert!("undersample+undersample".parse::<Strategy>().is_err());
    }

    #[test]
    fn minimal_config_defaults() {
        let cfg = ExperimentConfig::from_json(r#"{"articles_dir": "a", "train_labels": "t.tsv"}"#).unwrap();
        assert_eq!(cfg.strategies, vec![Strategy::BASELINE]);
        assert_eq!(cfg.feature_dim, 1 << 18);
        assert_eq!(cfg.train, TrainConfig::default());
        assert_eq!(cfg.undersample.keep_fraction["Loaded Language"], 0.2);
        assert!(cfg.context.train && cfg.context.dev && !cfg.context.mark_span);
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"articles_dir": "a", "train_labels": "t", "epochs": 3}"#).is_err());
    }

    #[test]
    fn global_seed_overrides_both() {
        let mut cfg = ExperimentConfig::from_json(r#"{"articles_dir": "a", "train_labels": "t"}"#).unwrap();
        cfg.train.seed = 3;
        cfg.undersample.seed = 4;
        assert_eq!((cfg.train_seed(), cfg.undersample_seed()), (3, 4));
        cfg.seed = Some(11);
        assert_eq!((cfg.train_seed(), cfg.undersample_seed()), (11, 11));
    }
}
