//! Config-driven experiment commands: corpus ingestion, statistics, single
//! model train/eval, and the strategy-matrix runner.
//!
//! Every arm composes its preprocessing in one fixed order:
//! undersample → context expansion → featurize → class weights → train.

mod config;
mod runner;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

pub use config::{ConfigError, ContextOptions, ExperimentConfig, Strategy};
pub use runner::{
    load_corpus, prepare_split, render_comparison, run_arm, run_experiment, ArmOutcome, ArmProvenance, ClassRetention,
    ExperimentSummary, LoadedCorpus, PreparedSplit, COMPOSITION_ORDER,
};

use crate::corpus::{duplicate_annotations, extract_samples, load_articles, parse_label_file, CorpusError, Manifest};
use crate::error::{Error, Result};
use crate::eval::{confusion, f1_scores, MetricsReport};
use crate::model::{read_model, write_model, Backend, SoftmaxRegression};
use crate::preprocess::ContextMode;
use crate::stats::{class_distribution, emit_stats, length_stats, OutputFormat};

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Overrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, config: &mut ExperimentConfig) {
        if let Some(seed) = self.seed {
            config.seed = Some(seed);
        }
        if let Some(out) = &self.output_dir {
            config.output_dir = out.clone();
        }
    }
}

pub fn load_manifest(config: &ExperimentConfig) -> Result<Manifest> {
    Ok(match &config.manifest {
        Some(p) => Manifest::load(p)?,
        None => Manifest::default_set(),
    })
}

pub(crate) fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("json serializes");
    bytes.push(b'\n');
    std::fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Per-split ingestion result.
#[derive(Debug, Clone, Serialize)]
pub struct SplitSummary {
    pub path: PathBuf,
    pub annotations: usize,
    pub duplicates: usize,
    /// Counts in manifest order.
    pub per_class: serde_json::Map<String, Value>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IngestSummary {
    pub valid: bool,
    pub articles: usize,
    pub load_warnings: Vec<String>,
    pub splits: BTreeMap<String, SplitSummary>,
    pub errors: Vec<String>,
}

fn summarize_split(
    name: &str,
    path: &Path,
    manifest: &Manifest,
    articles: &[crate::corpus::Article],
    errors: &mut Vec<String>,
) -> Option<SplitSummary> {
    let anns = match parse_label_file(path, manifest) {
        Ok(a) => a,
        Err(e) => {
            errors.push(format!("{name}: {}: {e}", path.display()));
            return None;
        }
    };
    if let Err(CorpusError::Validation(issues)) = extract_samples(articles, &anns) {
        errors.extend(issues.iter().map(|i| format!("{name}: {i}")));
    }
    let mut counts = vec![0usize; manifest.len()];
    for a in &anns {
        counts[a.label.index()] += 1;
    }
    let per_class = manifest
        .class_names()
        .iter()
        .zip(counts)
        .map(|(name, n)| (name.clone(), Value::from(n)))
        .collect();
    Some(SplitSummary {
        path: path.to_path_buf(),
        annotations: anns.len(),
        duplicates: duplicate_annotations(&anns),
        per_class,
    })
}

/// Load and validate the corpus, writing `ingest_summary.json` into the
/// output directory. The summary's `valid` flag is false on any corpus error.
pub fn cmd_ingest(config: &ExperimentConfig) -> Result<IngestSummary> {
    config.validate()?;
    let manifest = load_manifest(config)?;
    let mut errors = Vec::new();
    let (articles, report) = match load_articles(&config.articles_dir) {
        Ok(x) => x,
        Err(e) => {
            errors.push(e.to_string());
            (Vec::new(), Default::default())
        }
    };
    let mut splits = BTreeMap::new();
    let mut named = vec![("train", config.train_labels.as_path())];
    if let Some(dev) = &config.dev_labels {
        named.push(("dev", dev.as_path()));
    }
    for (name, path) in named {
        if let Some(s) = summarize_split(name, path, &manifest, &articles, &mut errors) {
            splits.insert(name.to_string(), s);
        }
    }
    let summary = IngestSummary {
        valid: errors.is_empty(),
        articles: articles.len(),
        load_warnings: report.warnings,
        splits,
        errors,
    };
    create_dir(&config.output_dir)?;
    write_json(
        &config.output_dir.join("ingest_summary.json"),
        &serde_json::to_value(&summary).expect("summary serializes"),
    )?;
    Ok(summary)
}

/// Class distribution and length statistics of the training split, written
/// as `distribution.<ext>` and `lengths.<ext>`.
pub fn cmd_stats(config: &ExperimentConfig, format: OutputFormat) -> Result<Vec<PathBuf>> {
    config.validate()?;
    let manifest = load_manifest(config)?;
    let corpus = load_corpus(config, &manifest, false)?;
    create_dir(&config.output_dir)?;
    let dist = class_distribution(&corpus.train, &manifest)?;
    let lengths = length_stats(&corpus.train, &manifest);
    let dist_path = config.output_dir.join(format!("distribution.{}", format.extension()));
    let len_path = config.output_dir.join(format!("lengths.{}", format.extension()));
    emit_stats(&dist, &dist_path, format)?;
    emit_stats(&lengths, &len_path, format)?;
    Ok(vec![dist_path, len_path])
}

/// Train one strategy on the training split and write the model file plus
/// `train_report.json`.
pub fn cmd_train(config: &ExperimentConfig, strategy: Strategy, model_path: &Path, overrides: &Overrides) -> Result<()> {
    config.validate()?;
    let manifest = load_manifest(config)?;
    let corpus = load_corpus(config, &manifest, false)?;
    let train = prepare_split(&corpus, &corpus.train, strategy, config, &manifest, true)?;
    let weights = runner::loss_weights(strategy, &train, &manifest)?;
    let mut backend = SoftmaxRegression::new(
        config.effective_train_config(),
        manifest.len(),
        config.feature_dim,
        manifest.hash(),
    );
    let labels: Vec<_> = train.samples.iter().map(|s| s.label()).collect();
    let trace = backend.fit(&train.features, &labels, weights.values())?;
    if let Some(parent) = model_path.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    write_model(&backend.model, model_path)?;
    create_dir(&config.output_dir)?;
    write_json(
        &config.output_dir.join("train_report.json"),
        &json!({
            "strategy": strategy,
            "config": config,
            "overrides": overrides,
            "seed": config.train_seed(),
            "model": model_path,
            "manifest_hash": manifest.hash_hex(),
            "train_samples": labels.len(),
            "retained_per_class": train.retention,
            "weights": weights,
            "loss_trace": trace,
        }),
    )
}

/// Evaluate a saved model on a labeled split (the config's dev split unless
/// `labels` is given) and write `eval_report.json`.
pub fn cmd_eval(
    config: &ExperimentConfig,
    model_path: &Path,
    labels: Option<&Path>,
    strategy: Strategy,
    overrides: &Overrides,
) -> Result<MetricsReport> {
    config.validate()?;
    let manifest = load_manifest(config)?;
    let model = read_model(model_path, &manifest)?;
    let label_path = labels
        .map(Path::to_path_buf)
        .or_else(|| config.dev_labels.clone())
        .ok_or(ConfigError::MissingField("dev_labels"))?;
    let (articles, _) = load_articles(&config.articles_dir)?;
    let anns = parse_label_file(&label_path, &manifest)?;
    if anns.is_empty() {
        return Err(ConfigError::EmptyEvaluationSet.into());
    }
    let samples = extract_samples(&articles, &anns)?;
    let corpus = LoadedCorpus::new(articles, Default::default(), samples, None);
    let eval_strategy = Strategy {
        undersample: false,
        cost_sensitive: false,
        context: if config.context.dev { strategy.context } else { ContextMode::None },
    };
    let eval_cfg = ExperimentConfig {
        feature_dim: model.dim(),
        ..config.clone()
    };
    let split = prepare_split(&corpus, &corpus.train, eval_strategy, &eval_cfg, &manifest, false)?;
    let golds: Vec<usize> = split.samples.iter().map(|s| s.label().index()).collect();
    let preds = split
        .features
        .iter()
        .map(|x| model.predict(x))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let report = f1_scores(&confusion(&golds, &preds, manifest.len())?);
    create_dir(&config.output_dir)?;
    write_json(
        &config.output_dir.join("eval_report.json"),
        &json!({
            "strategy": strategy,
            "config": config,
            "overrides": overrides,
            "seed": config.train_seed(),
            "model": model_path,
            "labels": label_path,
            "metrics": report.to_json(&manifest),
        }),
    )?;
    Ok(report)
}

/// Run every configured strategy arm and write per-arm reports,
/// `comparison.txt` and `provenance.json`.
pub fn cmd_experiment(config: &ExperimentConfig, overrides: &Overrides) -> Result<ExperimentSummary> {
    config.validate()?;
    if config.dev_labels.is_none() {
        return Err(ConfigError::MissingField("dev_labels").into());
    }
    let manifest = load_manifest(config)?;
    let corpus = load_corpus(config, &manifest, true)?;
    run_experiment(config, overrides, &manifest, &corpus)
}
