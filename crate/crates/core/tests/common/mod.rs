//! Synthetic task-format corpora and independent oracles for integration
//! tests.
#![allow(dead_code)]

pub mod oracles;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spanclf::corpus::DEFAULT_CLASSES;

const NOISE: [&str; 12] = [
    "the", "a", "news", "today", "report", "said", "people", "city", "new", "time", "year", "week",
];

#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub train_counts: Vec<usize>,
    pub dev_counts: Vec<usize>,
    /// Distinct signature words per class.
    pub signature_vocab: usize,
    /// Signature words drawn into each sample.
    pub signature_per_sample: usize,
    /// Shared noise words per sample.
    pub noise_per_sample: usize,
    /// Words of class 0's signature vocabulary planted into every other
    /// class's samples, to make the majority class a strong attractor.
    pub majority_overlap: usize,
    pub samples_per_article: usize,
    pub seed: u64,
}

impl SyntheticSpec {
    /// Fourteen classes, class 0 fifty times larger than the rest, every
    /// class with its own signature vocabulary.
    pub fn separable_imbalanced() -> Self {
        let mut train_counts = vec![10; 14];
        train_counts[0] = 500;
        let mut dev_counts = vec![4; 14];
        dev_counts[0] = 200;
        SyntheticSpec {
            train_counts,
            dev_counts,
            signature_vocab: 4,
            signature_per_sample: 2,
            noise_per_sample: 3,
            majority_overlap: 0,
            samples_per_article: 25,
            seed: 7,
        }
    }
}

fn signature_word(class: usize, j: usize) -> String {
    format!("sig{class}x{j}")
}

fn sample_text(spec: &SyntheticSpec, class: usize, rng: &mut ChaCha8Rng) -> String {
    let mut words: Vec<String> = Vec::new();
    for _ in 0..spec.signature_per_sample {
        words.push(signature_word(class, rng.gen_range(0..spec.signature_vocab)));
    }
    if class != 0 {
        for _ in 0..spec.majority_overlap {
            words.push(signature_word(0, rng.gen_range(0..spec.signature_vocab)));
        }
    }
    for _ in 0..spec.noise_per_sample {
        words.push(NOISE[rng.gen_range(0..NOISE.len())].to_string());
    }
    words.shuffle(rng);
    let mut text = words.join(" ");
    // capitalize like a sentence
    let first = text.remove(0).to_ascii_uppercase();
    text.insert(0, first);
    text
}

/// Write articles plus `train.tsv` and `dev.tsv`; returns (articles_dir,
/// train path, dev path).
pub fn write_corpus(root: &Path, spec: &SyntheticSpec) -> (PathBuf, PathBuf, PathBuf) {
    let articles_dir = root.join("articles");
    std::fs::create_dir_all(&articles_dir).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut next_id = 1000u64;
    let train = write_split(&articles_dir, &spec.train_counts, spec, &mut rng, &mut next_id);
    let dev = write_split(&articles_dir, &spec.dev_counts, spec, &mut rng, &mut next_id);
    let train_path = root.join("train.tsv");
    let dev_path = root.join("dev.tsv");
    std::fs::write(&train_path, train).unwrap();
    std::fs::write(&dev_path, dev).unwrap();
    (articles_dir, train_path, dev_path)
}

fn write_split(
    dir: &Path,
    counts: &[usize],
    spec: &SyntheticSpec,
    rng: &mut ChaCha8Rng,
    next_id: &mut u64,
) -> String {
    let mut classes: Vec<usize> = counts
        .iter()
        .enumerate()
        .flat_map(|(c, &n)| std::iter::repeat_n(c, n))
        .collect();
    classes.shuffle(rng);

    let mut labels = String::new();
    for chunk in classes.chunks(spec.samples_per_article) {
        let id = *next_id;
        *next_id += 1;
        let mut text = String::from("Café headline\n");
        for &class in chunk {
            if rng.gen_bool(0.3) {
                text.push_str("Unrelated filler, nothing here. ");
            }
            let span = sample_text(spec, class, rng);
            let start = text.chars().count();
            text.push_str(&span);
            let end = text.chars().count();
            text.push_str(if rng.gen_bool(0.5) { ". " } else { "!\n" });
            // alternate canonical and underscore spellings
            let name = if rng.gen_bool(0.5) {
                DEFAULT_CLASSES[class].to_string()
            } else {
                DEFAULT_CLASSES[class].replace(' ', "_")
            };
            let _ = writeln!(labels, "{id}\t{name}\t{start}\t{end}");
        }
        std::fs::write(dir.join(format!("article{id}.txt")), text).unwrap();
    }
    labels
}

/// Write an experiment config next to the corpus and return its path.
pub fn write_config(root: &Path, strategies: &[&str], extra: serde_json::Value) -> PathBuf {
    let mut cfg = serde_json::json!({
        "articles_dir": "articles",
        "train_labels": "train.tsv",
        "dev_labels": "dev.tsv",
        "strategies": strategies,
        "feature_dim": 4096,
        "output_dir": "out",
    });
    if let (Some(base), Some(more)) = (cfg.as_object_mut(), extra.as_object()) {
        for (k, v) in more {
            base.insert(k.clone(), v.clone());
        }
    }
    let path = root.join("experiment.json");
    std::fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    path
}
