use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{create_dir, write_json, ExperimentConfig, Overrides, Strategy};
use crate::corpus::{extract_samples, load_articles, parse_label_file, Article, LabeledSample, LoadReport, Manifest};
use crate::error::Result;
use crate::eval::{confusion, f1_scores, MetricsReport};
use crate::model::{Backend, ModelError, SoftmaxRegression};
use crate::preprocess::{apply_context, featurize, tokenize, undersample_indices, ContextMode, FeatureVector};
use crate::weights::{compute_class_weights, ClassCounts, ClassWeights};

/// Preprocessing steps in the order every arm applies them.
pub const COMPOSITION_ORDER: [&str; 5] = ["undersample", "context_expansion", "featurize", "weights", "train"];

/// Articles plus extracted train (and optionally dev) samples.
#[derive(Debug, Clone)]
pub struct LoadedCorpus {
    pub articles: Vec<Article>,
    pub load_report: LoadReport,
    pub train: Vec<LabeledSample>,
    pub dev: Option<Vec<LabeledSample>>,
    by_id: HashMap<u64, usize>,
}

impl LoadedCorpus {
    pub fn new(
        articles: Vec<Article>,
        load_report: LoadReport,
        train: Vec<LabeledSample>,
        dev: Option<Vec<LabeledSample>>,
    ) -> Self {
        let by_id = articles.iter().enumerate().map(|(i, a)| (a.id(), i)).collect();
        LoadedCorpus {
            articles,
            load_report,
            train,
            dev,
            by_id,
        }
    }

    pub fn article(&self, id: u64) -> Option<&Article> {
        self.by_id.get(&id).map(|&i| &self.articles[i])
    }
}

pub fn load_corpus(config: &ExperimentConfig, manifest: &Manifest, with_dev: bool) -> Result<LoadedCorpus> {
    let (articles, report) = load_articles(&config.articles_dir)?;
    let train_anns = parse_label_file(&config.train_labels, manifest)?;
    let train = extract_samples(&articles, &train_anns)?;
    let dev = match (&config.dev_labels, with_dev) {
        (Some(p), true) => Some(extract_samples(&articles, &parse_label_file(p, manifest)?)?),
        _ => None,
    };
    Ok(LoadedCorpus::new(articles, report, train, dev))
}

/// Per-class effect of undersampling on the training split.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassRetention {
    pub class: String,
    pub keep_fraction: f64,
    pub before: usize,
    pub after: usize,
}

#[derive(Debug, Clone)]
pub struct PreparedSplit {
    pub samples: Vec<LabeledSample>,
    pub features: Vec<FeatureVector>,
    pub retention: Option<Vec<ClassRetention>>,
}

/// Apply the arm's undersampling (train only), context expansion and
/// featurization to one split.
pub fn prepare_split(
    corpus: &LoadedCorpus,
    samples: &[LabeledSample],
    strategy: Strategy,
    config: &ExperimentConfig,
    manifest: &Manifest,
    is_train: bool,
) -> Result<PreparedSplit> {
    let mut retention = None;
    let mut samples: Vec<LabeledSample> = if is_train && strategy.undersample {
        let fractions = config.undersample.resolve(manifest)?;
        let labels: Vec<_> = samples.iter().map(LabeledSample::label).collect();
        let keep = undersample_indices(&labels, &fractions, config.undersample_seed());
        let kept: Vec<LabeledSample> = keep.iter().map(|&i| samples[i].clone()).collect();
        let mut before = vec![0usize; manifest.len()];
        let mut after = vec![0usize; manifest.len()];
        labels.iter().for_each(|l| before[l.index()] += 1);
        kept.iter().for_each(|s| after[s.label().index()] += 1);
        retention = Some(
            manifest
                .labels()
                .map(|l| ClassRetention {
                    class: manifest.name(l).to_string(),
                    keep_fraction: fractions.get(l),
                    before: before[l.index()],
                    after: after[l.index()],
                })
                .collect(),
        );
        kept
    } else {
        samples.to_vec()
    };

    let expand = strategy.context != ContextMode::None && if is_train { config.context.train } else { config.context.dev };
    if expand {
        for s in &mut samples {
            let article = corpus
                .article(s.annotation.article_id)
                .expect("samples were extracted from this corpus");
            apply_context(s, article, strategy.context, config.context.mark_span)?;
        }
    }

    let features = samples
        .iter()
        .map(|s| featurize(&tokenize(&s.input_text), config.feature_dim))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(PreparedSplit {
        samples,
        features,
        retention,
    })
}

/// Per-class loss multipliers used for one arm.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LossWeights {
    Unweighted { values: Vec<f64> },
    CostSensitive { counts: ClassCounts, class_weights: ClassWeights },
}

impl LossWeights {
    pub fn values(&self) -> &[f64] {
        match self {
            LossWeights::Unweighted { values } => values,
            LossWeights::CostSensitive { class_weights, .. } => class_weights.weights(),
        }
    }
}

/// All ones, or inverse-frequency weights over the (post-undersampling)
/// training split when the arm is cost sensitive.
pub fn loss_weights(strategy: Strategy, train: &PreparedSplit, manifest: &Manifest) -> Result<LossWeights> {
    if !strategy.cost_sensitive {
        return Ok(LossWeights::Unweighted {
            values: vec![1.0; manifest.len()],
        });
    }
    let mut counts = vec![0u64; manifest.len()];
    for s in &train.samples {
        counts[s.label().index()] += 1;
    }
    let counts = ClassCounts::new(counts)?;
    let class_weights = compute_class_weights(&counts);
    Ok(LossWeights::CostSensitive { counts, class_weights })
}

#[derive(Debug, Clone, Serialize)]
pub struct ArmProvenance {
    pub strategy: Strategy,
    /// True when the arm combines more than one technique.
    pub extension: bool,
    pub steps: Vec<&'static str>,
    pub train_seed: u64,
    pub undersample_seed: Option<u64>,
    pub train_samples: usize,
    pub dev_samples: usize,
    pub retained_per_class: Option<Vec<ClassRetention>>,
    pub loss_weights: Option<LossWeights>,
    pub loss_trace: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ArmOutcome {
    pub strategy: Strategy,
    pub metrics: Option<MetricsReport>,
    pub error: Option<String>,
    pub provenance: ArmProvenance,
}

/// Train and evaluate one arm. Failures are captured in the outcome rather
/// than returned so the remaining arms still run.
pub fn run_arm(strategy: Strategy, corpus: &LoadedCorpus, config: &ExperimentConfig, manifest: &Manifest) -> ArmOutcome {
    let mut steps: Vec<&'static str> = Vec::new();
    if strategy.undersample {
        steps.push(COMPOSITION_ORDER[0]);
    }
    if strategy.context != ContextMode::None {
        steps.push(COMPOSITION_ORDER[1]);
    }
    steps.push(COMPOSITION_ORDER[2]);
    if strategy.cost_sensitive {
        steps.push(COMPOSITION_ORDER[3]);
    }
    steps.push(COMPOSITION_ORDER[4]);

    let mut provenance = ArmProvenance {
        strategy,
        extension: strategy.technique_count() > 1,
        steps,
        train_seed: config.train_seed(),
        undersample_seed: strategy.undersample.then(|| config.undersample_seed()),
        train_samples: 0,
        dev_samples: 0,
        retained_per_class: None,
        loss_weights: None,
        loss_trace: Vec::new(),
    };

    let result = (|| -> Result<MetricsReport> {
        let dev_samples = corpus.dev.as_deref().unwrap_or_default();
        let train = prepare_split(corpus, &corpus.train, strategy, config, manifest, true)?;
        let dev = prepare_split(corpus, dev_samples, strategy, config, manifest, false)?;
        provenance.train_samples = train.samples.len();
        provenance.dev_samples = dev.samples.len();
        provenance.retained_per_class = train.retention.clone();

        let weights = loss_weights(strategy, &train, manifest)?;
        provenance.loss_weights = Some(weights.clone());

        let mut backend = SoftmaxRegression::new(
            config.effective_train_config(),
            manifest.len(),
            config.feature_dim,
            manifest.hash(),
        );
        let labels: Vec<_> = train.samples.iter().map(LabeledSample::label).collect();
        provenance.loss_trace = backend.fit(&train.features, &labels, weights.values())?;

        let golds: Vec<usize> = dev.samples.iter().map(|s| s.label().index()).collect();
        let preds = dev
            .features
            .iter()
            .map(|x| backend.predict(x).map(|l| l.index()))
            .collect::<std::result::Result<Vec<_>, ModelError>>()?;
        Ok(f1_scores(&confusion(&golds, &preds, manifest.len())?))
    })();

    match result {
        Ok(metrics) => ArmOutcome {
            strategy,
            metrics: Some(metrics),
            error: None,
            provenance,
        },
        Err(e) => ArmOutcome {
            strategy,
            metrics: None,
            error: Some(format!("strategy {strategy} failed: {e}")),
            provenance,
        },
    }
}

/// Plain-text strategy × F1 table, one row per arm in config order.
pub fn render_comparison(outcomes: &[ArmOutcome]) -> String {
    let width = outcomes
        .iter()
        .map(|o| o.strategy.to_string().len())
        .chain(["strategy".len()])
        .max()
        .unwrap_or(0)
        + 2;
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$}{:>10}{:>10}", "strategy", "micro_f1", "macro_f1");
    for o in outcomes {
        let name = o.strategy.to_string();
        match (&o.metrics, &o.error) {
            (Some(m), _) => {
                let _ = writeln!(out, "{name:<width$}{:>10.5}{:>10.5}", m.micro_f1, m.macro_f1);
            }
            (None, Some(e)) => {
                let _ = writeln!(out, "{name:<width$}  FAILED: {e}");
            }
            (None, None) => unreachable!("arm outcome has neither metrics nor error"),
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct ExperimentSummary {
    pub outcomes: Vec<ArmOutcome>,
    pub comparison: String,
    pub failed: usize,
}

/// Run all arms (concurrently, each single-threaded) and write
/// `arms/<strategy>/metrics.json`, `comparison.txt` and `provenance.json`
/// under the output directory.
pub fn run_experiment(
    config: &ExperimentConfig,
    overrides: &Overrides,
    manifest: &Manifest,
    corpus: &LoadedCorpus,
) -> Result<ExperimentSummary> {
    let outcomes: Vec<ArmOutcome> = config
        .strategies
        .par_iter()
        .map(|&s| {
            log::info!("running arm {s}");
            run_arm(s, corpus, config, manifest)
        })
        .collect();

    let out = &config.output_dir;
    create_dir(out)?;
    for o in &outcomes {
        let dir = out.join("arms").join(o.strategy.to_string());
        create_dir(&dir)?;
        write_json(
            &dir.join("metrics.json"),
            &json!({
                "strategy": o.strategy,
                "config": config,
                "overrides": overrides,
                "seed": config.train_seed(),
                "error": o.error,
                "metrics": o.metrics.as_ref().map(|m| m.to_json(manifest)),
                "provenance": o.provenance,
            }),
        )?;
    }

    let comparison = render_comparison(&outcomes);
    std::fs::write(out.join("comparison.txt"), &comparison).map_err(|source| crate::Error::Io {
        path: out.join("comparison.txt"),
        source,
    })?;
    write_json(
        &out.join("provenance.json"),
        &json!({
            "config": config,
            "overrides": overrides,
            "seed": config.seed,
            "train_seed": config.train_seed(),
            "undersample_seed": config.undersample_seed(),
            "manifest_hash": manifest.hash_hex(),
            "composition_order": COMPOSITION_ORDER,
            "load_warnings": corpus.load_report.warnings,
            "arms": outcomes.iter().map(|o| &o.provenance).collect::<Vec<_>>(),
        }),
    )?;

    let failed = outcomes.iter().filter(|o| o.error.is_some()).count();
    Ok(ExperimentSummary {
        outcomes,
        comparison,
        failed,
    })
}
