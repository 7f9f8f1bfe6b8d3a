use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::linear::{logit_gradient, softmax, weighted_ce_loss, LinearModel};
use super::ModelError;
use crate::corpus::TechniqueLabel;
use crate::preprocess::FeatureVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub l2: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 20,
            learning_rate: 0.1,
            batch_size: 32,
            l2: 1e-4,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(ModelError::InvalidConfig("learning_rate must be positive".into()));
        }
        if self.batch_size == 0 {
            return Err(ModelError::InvalidConfig("batch_size must be positive".into()));
        }
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return Err(ModelError::InvalidConfig("l2 must be non-negative".into()));
        }
        if self.learning_rate * self.l2 >= 1.0 {
            return Err(ModelError::InvalidConfig(
                "learning_rate * l2 must be below 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: LinearModel,
    /// Full-data objective at initialization followed by one value per epoch.
    pub loss_trace: Vec<f64>,
}

// W is held as scale * v so the L2 shrink is O(1) per step.
struct ScaledWeights {
    k: usize,
    d: usize,
    v: Vec<f64>,
    b: Vec<f64>,
    scale: f64,
}

impl ScaledWeights {
    fn logits(&self, x: &FeatureVector) -> Vec<f64> {
        (0..self.k)
            .map(|j| self.scale * x.dot(&self.v[j * self.d..(j + 1) * self.d]) + self.b[j])
            .collect()
    }

    fn squared_norm(&self) -> f64 {
        self.scale * self.scale * self.v.iter().map(|x| x * x).sum::<f64>()
    }

    fn fold_scale(&mut self) {
        for x in &mut self.v {
            *x *= self.scale;
        }
        self.scale = 1.0;
    }

    fn objective(&self, features: &[FeatureVector], labels: &[TechniqueLabel], weights: &[f64], l2: f64) -> f64 {
        let total: f64 = features
            .iter()
            .zip(labels)
            .map(|(x, y)| {
                let p = softmax(&self.logits(x));
                if p.iter().any(|v| v.is_nan()) {
                    return f64::NAN;
                }
                weighted_ce_loss(&p, y.index(), weights).expect("labels validated")
            })
            .sum();
        total / features.len() as f64 + 0.5 * l2 * self.squared_norm()
    }
}

/// Mini-batch gradient descent from a zero model.
///
/// Each step uses the batch mean of the per-sample weighted loss plus
/// `l2/2 * ||W||^2`. Sample order is reshuffled at the start of every epoch
/// from a ChaCha8 stream seeded by `config.seed`, so equal inputs give a
/// bitwise-equal model.
pub fn train(
    features: &[FeatureVector],
    labels: &[TechniqueLabel],
    weights: &[f64],
    num_classes: usize,
    dim: usize,
    manifest_hash: [u8; 32],
    config: &TrainConfig,
) -> Result<TrainOutcome, ModelError> {
    config.validate()?;
    if features.len() != labels.len() {
        return Err(ModelError::LengthMismatch {
            features: features.len(),
            labels: labels.len(),
        });
    }
    if features.is_empty() {
        return Err(ModelError::EmptyTrainingSet);
    }
    if weights.len() != num_classes {
        return Err(ModelError::WeightCount {
            got: weights.len(),
            k: num_classes,
        });
    }
    for x in features {
        if x.dim() != dim {
            return Err(ModelError::DimensionMismatch {
                expected: dim,
                got: x.dim(),
            });
        }
    }
    if let Some(y) = labels.iter().find(|y| y.index() >= num_classes) {
        return Err(ModelError::LabelOutOfRange {
            label: y.index(),
            k: num_classes,
        });
    }

    let mut state = ScaledWeights {
        k: num_classes,
        d: dim,
        v: vec![0.0; num_classes * dim],
        b: vec![0.0; num_classes],
        scale: 1.0,
    };
    let lr = config.learning_rate;
    let shrink = 1.0 - lr * config.l2;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..features.len()).collect();

    let mut loss_trace = vec![state.objective(features, labels, weights, config.l2)];
    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(config.batch_size) {
            let inv_batch = 1.0 / batch.len() as f64;
            let grads: Vec<Vec<f64>> = batch
                .iter()
                .map(|&i| {
                    let p = softmax(&state.logits(&features[i]));
                    let y = labels[i].index();
                    logit_gradient(&p, y, weights[y])
                })
                .collect();

            state.scale *= shrink;
            if state.scale < 1e-6 {
                state.fold_scale();
            }
            let step = lr * inv_batch / state.scale;
            for (&i, g) in batch.iter().zip(&grads) {
                for (j, &gj) in g.iter().enumerate() {
                    state.b[j] -= lr * inv_batch * gj;
                    if gj == 0.0 {
                        continue;
                    }
                    let row = &mut state.v[j * dim..(j + 1) * dim];
                    for &(c, xc) in features[i].entries() {
                        row[c as usize] -= step * gj * xc;
                    }
                }
            }
        }
        let loss = state.objective(features, labels, weights, config.l2);
        if !loss.is_finite() {
            return Err(ModelError::Diverged {
                epoch,
                loss,
                learning_rate: lr,
            });
        }
        loss_trace.push(loss);
    }

    state.fold_scale();
    let model = LinearModel::from_parts(num_classes, dim, state.v, state.b, manifest_hash).map_err(|_| {
        ModelError::Diverged {
            epoch: config.epochs,
            loss: f64::NAN,
            learning_rate: lr,
        }
    })?;
    Ok(TrainOutcome { model, loss_trace })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn separable(dim: usize) -> (Vec<FeatureVector>, Vec<TechniqueLabel>) {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in 0..40u32 {
            let class = (i % 2) as usize;
            let signal = if class == 0 { 0 } else { 1 };
            xs.push(FeatureVector::from_pairs(dim, [(signal, 0.8), (2 + i % 5, 0.6)]));
            ys.push(TechniqueLabel::new(class));
        }
        (xs, ys)
    }

    #[test]
    fn zero_epochs_returns_zero_model() {
        let (xs, ys) = separable(16);
        let cfg = TrainConfig {
            epochs: 0,
            ..TrainConfig::default()
        };
        let out = train(&xs, &ys, &[1.0, 1.0], 2, 16, [0; 32], &cfg).unwrap();
        assert_eq!(out.model, LinearModel::zeros(2, 16, [0; 32]));
        assert_eq!(out.loss_trace.len(), 1);
    }

    #[test]
    fn separable_fixture_reaches_full_accuracy() {
        let (xs, ys) = separable(16);
        let out = train(&xs, &ys, &[1.0, 1.0], 2, 16, [0; 32], &TrainConfig::default()).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(out.model.predict(x).unwrap(), y.index());
        }
        assert!(out.loss_trace.last().unwrap() < &out.loss_trace[0]);
    }

    #[test]
    fn loss_trace_has_no_large_upticks() {
        let (xs, ys) = separable(16);
        let out = train(&xs, &ys, &[1.0, 1.0], 2, 16, [0; 32], &TrainConfig::default()).unwrap();
        assert_eq!(out.loss_trace.len(), 21);
        for pair in out.loss_trace.windows(2) {
            assert!(pair[1] <= pair[0] * 1.05, "{:?}", out.loss_trace);
        }
    }

    #[test]
    fn deterministic_for_equal_seed() {
        let (xs, ys) = separable(16);
        let cfg = TrainConfig {
            batch_size: 3,
            seed: 9,
            ..TrainConfig::default()
        };
        let a = train(&xs, &ys, &[0.3, 0.7], 2, 16, [0; 32], &cfg).unwrap();
        let b = train(&xs, &ys, &[0.3, 0.7], 2, 16, [0; 32], &cfg).unwrap();
        assert_eq!(a.model, b.model);
        assert_eq!(a.loss_trace, b.loss_trace);
    }

    #[test]
    fn rejects_bad_inputs() {
        let (xs, ys) = separable(16);
        let cfg = TrainConfig::default();
        assert!(matches!(
            train(&[], &[], &[1.0, 1.0], 2, 16, [0; 32], &cfg),
            Err(ModelError::EmptyTrainingSet)
        ));
        assert!(matches!(
            train(&xs, &ys, &[1.0], 2, 16, [0; 32], &cfg),
            Err(ModelError::WeightCount { .. })
        ));
        let bad = TrainConfig {
            batch_size: 0,
            ..TrainConfig::default()
        };
        assert!(matches!(
            train(&xs, &ys, &[1.0, 1.0], 2, 16, [0; 32], &bad),
            Err(ModelError::InvalidConfig(_))
        ));
    }

    #[test]
    fn huge_learning_rate_diverges_with_guidance() {
        let (xs, ys) = separable(16);
        let cfg = TrainConfig {
            learning_rate: 1e308,
            l2: 0.0,
            ..TrainConfig::default()
        };
        let err = train(&xs, &ys, &[1.0, 1.0], 2, 16, [0; 32], &cfg).unwrap_err();
        assert!(matches!(err, ModelError::Diverged { .. }), "{err:?}");
        assert!(err.to_string().contains("learning rate"));
    }
}
