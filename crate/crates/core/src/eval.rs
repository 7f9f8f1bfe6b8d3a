//! Confusion matrices, per-class precision/recall/F1, micro and macro
//! aggregates, and high/intermediate/low performance buckets.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::corpus::Manifest;

/// Lower F1 bound of the high bucket (inclusive).
pub const HIGH_F1: f64 = 0.5;
/// Lower F1 bound of the intermediate bucket (inclusive).
pub const INTERMEDIATE_F1: f64 = 0.1;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("gold and predicted sequences differ in length ({golds} vs {preds})")]
    LengthMismatch { golds: usize, preds: usize },
    #[error("label {label} out of range for {k} classes")]
    LabelOutOfRange { label: usize, k: usize },
}

/// `k x k` counts; entry `(g, p)` is gold class `g` predicted as `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    k: usize,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn zeros(k: usize) -> Self {
        ConfusionMatrix {
            k,
            counts: vec![0; k * k],
        }
    }

    /// Build from explicit rows (one per gold class).
    pub fn from_rows(rows: &[Vec<u64>]) -> Self {
        let k = rows.len();
        assert!(rows.iter().all(|r| r.len() == k), "confusion matrix must be square");
        ConfusionMatrix {
            k,
            counts: rows.concat(),
        }
    }

    pub fn num_classes(&self) -> usize {
        self.k
    }

    pub fn get(&self, gold: usize, pred: usize) -> u64 {
        self.counts[gold * self.k + pred]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn diagonal_sum(&self) -> u64 {
        (0..self.k).map(|i| self.get(i, i)).sum()
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.counts.chunks(self.k.max(1)).map(<[u64]>::to_vec).collect()
    }
}

pub fn confusion(golds: &[usize], preds: &[usize], k: usize) -> Result<ConfusionMatrix, EvalError> {
    if golds.len() != preds.len() {
        return Err(EvalError::LengthMismatch {
            golds: golds.len(),
            preds: preds.len(),
        });
    }
    let mut m = ConfusionMatrix::zeros(k);
    for (&g, &p) in golds.iter().zip(preds) {
        if let Some(&label) = [g, p].iter().find(|&&l| l >= k) {
            return Err(EvalError::LabelOutOfRange { label, k });
        }
        m.counts[g * k + p] += 1;
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bucket {
    High,
    Intermediate,
    Low,
}

impl Bucket {
    pub fn of(f1: f64) -> Bucket {
        if f1 >= HIGH_F1 {
            Bucket::High
        } else if f1 >= INTERMEDIATE_F1 {
            Bucket::Intermediate
        } else {
            Bucket::Low
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Number of gold samples of the class.
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub per_class: Vec<ClassMetrics>,
    pub micro_f1: f64,
    pub macro_f1: f64,
    pub accuracy: f64,
    pub buckets: Vec<Bucket>,
    pub confusion: ConfusionMatrix,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Metrics for every class plus pooled (micro) and averaged (macro) F1.
/// Zero denominators give 0, never NaN.
pub fn f1_scores(matrix: &ConfusionMatrix) -> MetricsReport {
    let k = matrix.k;
    let mut per_class = Vec::with_capacity(k);
    let (mut tp_all, mut fp_all, mut fn_all) = (0u64, 0u64, 0u64);
    for c in 0..k {
        let tp = matrix.get(c, c);
        let gold: u64 = (0..k).map(|p| matrix.get(c, p)).sum();
        let predicted: u64 = (0..k).map(|g| matrix.get(g, c)).sum();
        let (fp, fneg) = (predicted - tp, gold - tp);
        tp_all += tp;
        fp_all += fp;
        fn_all += fneg;
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fneg);
        per_class.push(ClassMetrics {
            precision,
            recall,
            f1: harmonic(precision, recall),
            support: gold,
        });
    }
    let micro_f1 = harmonic(ratio(tp_all, tp_all + fp_all), ratio(tp_all, tp_all + fn_all));
    let macro_f1 = if k == 0 {
        0.0
    } else {
        per_class.iter().map(|m| m.f1).sum::<f64>() / k as f64
    };
    let buckets = performance_buckets(&per_class);
    MetricsReport {
        per_class,
        micro_f1,
        macro_f1,
        accuracy: ratio(matrix.diagonal_sum(), matrix.total()),
        buckets,
        confusion: matrix.clone(),
    }
}

pub fn performance_buckets(per_class: &[ClassMetrics]) -> Vec<Bucket> {
    per_class.iter().map(|m| Bucket::of(m.f1)).collect()
}

impl MetricsReport {
    /// True when every class has strictly positive F1.
    pub fn all_classes_nonzero(&self) -> bool {
        self.per_class.iter().all(|m| m.f1 > 0.0)
    }

    /// JSON keyed by canonical class names.
    pub fn to_json(&self, manifest: &Manifest) -> Value {
        let mut classes = Map::new();
        for (i, (m, b)) in self.per_class.iter().zip(&self.buckets).enumerate() {
            classes.insert(
                manifest.class_names()[i].clone(),
                json!({
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "support": m.support,
                    "bucket": b,
                }),
            );
        }
        json!({
            "micro_f1": self.micro_f1,
            "macro_f1": self.macro_f1,
            "accuracy": self.accuracy,
            "classes": classes,
            "confusion": self.confusion.rows(),
        })
    }
}
