//! Inverse-frequency class weights for cost-sensitive training.
//!
//! For class counts `l`, the raw cost of class `i` is `c_i = sum(l) / l_i`
//! and the weight is `w_i = c_i / sum(c)`. Weights are positive, sum to one
//! and `w_i * l_i` is the same for every class.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WeightsError {
    #[error("class {class} has no training samples; class weights are undefined, fix the split or drop the class from the manifest")]
    ZeroCount { class: usize },
    #[error("no class counts given")]
    Empty,
}

/// Per-class sample counts in manifest order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassCounts(Vec<u64>);

impl ClassCounts {
    pub fn new(counts: Vec<u64>) -> Result<Self, WeightsError> {
        if counts.is_empty() {
            return Err(WeightsError::Empty);
        }
        if let Some(class) = counts.iter().position(|&c| c == 0) {
            return Err(WeightsError::ZeroCount { class });
        }
        Ok(ClassCounts(counts))
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }
}

/// Normalized weights plus the raw costs they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassWeights {
    costs: Vec<f64>,
    weights: Vec<f64>,
}

impl ClassWeights {
    /// Normalized weight vector `w`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Raw inverse-frequency costs `c`.
    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

pub fn compute_class_weights(counts: &ClassCounts) -> ClassWeights {
    let total: f64 = counts.0.iter().map(|&l| l as f64).sum();
    let costs: Vec<f64> = counts.0.iter().map(|&l| total / l as f64).collect();
    let cost_sum: f64 = costs.iter().sum();
    let weights = costs.iter().map(|c| c / cost_sum).collect();
    ClassWeights { costs, weights }
}

/// Validate `counts` and compute weights in one step.
pub fn class_weights_from_counts(counts: &[u64]) -> Result<ClassWeights, WeightsError> {
    Ok(compute_class_weights(&ClassCounts::new(counts.to_vec())?))
}
