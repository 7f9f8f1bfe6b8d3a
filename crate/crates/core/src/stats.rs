//! Descriptive statistics: class distribution and per-class span lengths
//! (in words, as segmented by [`tokenize`]).

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::corpus::{LabeledSample, Manifest, TechniqueLabel};
use crate::preprocess::tokenize;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("class distribution of an empty sample set is undefined")]
    EmptyInput,
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassShare {
    pub class: String,
    pub count: usize,
    pub fraction: f64,
}

impl ClassShare {
    /// Percentage with one decimal, e.g. `34.6`.
    pub fn percent(&self) -> String {
        format!("{:.1}", self.fraction * 100.0)
    }
}

/// Count and share of every manifest class, in class-index order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionReport {
    pub classes: Vec<ClassShare>,
    pub total: usize,
}

impl DistributionReport {
    pub fn get(&self, class: &str) -> Option<&ClassShare> {
        self.classes.iter().find(|c| c.class == class)
    }

    pub fn counts(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.count).collect()
    }
}

pub fn class_distribution_of_labels(
    labels: impl IntoIterator<Item = TechniqueLabel>,
    manifest: &Manifest,
) -> Result<DistributionReport, StatsError> {
    let mut counts = vec![0usize; manifest.len()];
    for l in labels {
        counts[l.index()] += 1;
    }
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(StatsError::EmptyInput);
    }
    let classes = manifest
        .class_names()
        .iter()
        .zip(counts)
        .map(|(name, count)| ClassShare {
            class: name.clone(),
            count,
            fraction: count as f64 / total as f64,
        })
        .collect();
    Ok(DistributionReport { classes, total })
}

pub fn class_distribution(samples: &[LabeledSample], manifest: &Manifest) -> Result<DistributionReport, StatsError> {
    class_distribution_of_labels(samples.iter().map(LabeledSample::label), manifest)
}

/// Five-number summary of one class's span lengths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthStats {
    pub class: String,
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthReport {
    pub classes: Vec<LengthStats>,
}

fn median_sorted(xs: &[usize]) -> f64 {
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2] as f64
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) as f64 / 2.0
    }
}

/// (min, q1, median, q3, max) using the median-of-halves convention: q1 and
/// q3 are the medians of the lower and upper halves, which exclude the
/// middle element when the count is odd. A singleton's halves are the
/// singleton itself. Returns `None` for empty input.
pub fn five_numbers(values: &[usize]) -> Option<(f64, f64, f64, f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let mut xs = values.to_vec();
    xs.sort_unstable();
    let n = xs.len();
    let median = median_sorted(&xs);
    let (q1, q3) = if n == 1 {
        (median, median)
    } else {
        let half = n / 2;
        (median_sorted(&xs[..half]), median_sorted(&xs[n - half..]))
    };
    Some((xs[0] as f64, q1, median, q3, xs[n - 1] as f64))
}

/// Word-length box statistics per class over `span_text`. Classes with no
/// samples are omitted.
pub fn length_stats(samples: &[LabeledSample], manifest: &Manifest) -> LengthReport {
    let mut lengths: Vec<Vec<usize>> = vec![Vec::new(); manifest.len()];
    for s in samples {
        lengths[s.label().index()].push(tokenize(&s.span_text).len());
    }
    let classes = lengths
        .iter()
        .enumerate()
        .filter_map(|(i, ls)| {
            let (min, q1, median, q3, max) = five_numbers(ls)?;
            Some(LengthStats {
                class: manifest.name(TechniqueLabel::new(i)).to_string(),
                count: ls.len(),
                min,
                q1,
                median,
                q3,
                max,
            })
        })
        .collect();
    LengthReport { classes }
}

/// A report that can be written as a CSV table or a JSON object keyed by
/// class name.
pub trait StatsTable {
    fn csv_header(&self) -> Vec<&'static str>;
    fn csv_rows(&self) -> Vec<Vec<String>>;
    fn to_json(&self) -> Value;
}

impl StatsTable for DistributionReport {
    fn csv_header(&self) -> Vec<&'static str> {
        vec!["class", "count", "fraction"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.classes
            .iter()
            .map(|c| vec![c.class.clone(), c.count.to_string(), c.fraction.to_string()])
            .collect()
    }

    fn to_json(&self) -> Value {
        let mut classes = Map::new();
        for c in &self.classes {
            classes.insert(
                c.class.clone(),
                serde_json::json!({
                    "count": c.count,
                    "fraction": c.fraction,
                    "percent": c.percent(),
                }),
            );
        }
        serde_json::json!({ "total": self.total, "classes": classes })
    }
}

impl StatsTable for LengthReport {
    fn csv_header(&self) -> Vec<&'static str> {
        vec!["class", "count", "min", "q1", "median", "q3", "max"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.classes
            .iter()
            .map(|c| {
                vec![
                    c.class.clone(),
                    c.count.to_string(),
                    c.min.to_string(),
                    c.q1.to_string(),
                    c.median.to_string(),
                    c.q3.to_string(),
                    c.max.to_string(),
                ]
            })
            .collect()
    }

    fn to_json(&self) -> Value {
        let mut classes = Map::new();
        for c in &self.classes {
            classes.insert(
                c.class.clone(),
                serde_json::json!({
                    "count": c.count,
                    "min": c.min,
                    "q1": c.q1,
                    "median": c.median,
                    "q3": c.q3,
                    "max": c.max,
                }),
            );
        }
        Value::Object(classes)
    }
}

pub fn render_stats<R: StatsTable>(report: &R, format: OutputFormat) -> Result<Vec<u8>, StatsError> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(report.csv_header())?;
            for row in report.csv_rows() {
                w.write_record(&row)?;
            }
            w.into_inner().map_err(|e| StatsError::Csv(e.into_error().into()))
        }
        OutputFormat::Json => {
            let mut out = serde_json::to_vec_pretty(&report.to_json()).expect("stats serialize");
            out.push(b'\n');
            Ok(out)
        }
    }
}

/// Write `report` to `path`. Output is byte-stable for equal reports.
pub fn emit_stats<R: StatsTable>(report: &R, path: &Path, format: OutputFormat) -> Result<(), StatsError> {
    let bytes = render_stats(report, format)?;
    let io_err = |source| StatsError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut f = std::fs::File::create(path).map_err(io_err)?;
    f.write_all(&bytes).map_err(io_err)
}
