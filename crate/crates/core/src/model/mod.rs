//! Classifier backend: multinomial softmax regression with a class-weighted
//! cross-entropy loss.

mod io;
mod linear;
mod train;

use thiserror::Error;

use crate::corpus::TechniqueLabel;
use crate::preprocess::FeatureVector;

pub use io::{read_model, write_model, MODEL_MAGIC};
pub use linear::{argmax_lowest, loss_gradient, objective, weighted_ce_loss, Gradient, LinearModel};
pub use train::{train, TrainConfig, TrainOutcome};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("feature dimension mismatch: model expects {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("class index {label} out of range for {k} classes")]
    LabelOutOfRange { label: usize, k: usize },
    #[error("weight vector has {got} entries, model has {k} classes")]
    WeightCount { got: usize, k: usize },
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("features and labels differ in length ({features} vs {labels})")]
    LengthMismatch { features: usize, labels: usize },
    #[error("training loss became {loss} at epoch {epoch}; learning rate {learning_rate} is likely too large, try a smaller value")]
    Diverged {
        epoch: usize,
        loss: f64,
        learning_rate: f64,
    },
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("model was trained with a different label manifest (model {model}, given {given})")]
    ManifestMismatch { model: String, given: String },
    #[error("malformed model file: {0}")]
    Format(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl ModelError {
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            ModelError::Diverged { .. } | ModelError::Io { .. } | ModelError::Format(_)
        )
    }
}

/// A trainable probabilistic classifier over hashed features.
///
/// `weights` holds one loss multiplier per class; unweighted training passes
/// all ones.
pub trait Backend {
    /// Fit on the given data, returning the per-epoch training-loss trace.
    fn fit(
        &mut self,
        features: &[FeatureVector],
        labels: &[TechniqueLabel],
        weights: &[f64],
    ) -> Result<Vec<f64>, ModelError>;

    fn predict_proba(&self, x: &FeatureVector) -> Result<Vec<f64>, ModelError>;

    /// Most probable class, lowest index on ties.
    fn predict(&self, x: &FeatureVector) -> Result<TechniqueLabel, ModelError> {
        Ok(TechniqueLabel::new(argmax_lowest(&self.predict_proba(x)?)))
    }
}

/// The shipped backend: a [`LinearModel`] refit from zero by [`train`].
#[derive(Debug, Clone)]
pub struct SoftmaxRegression {
    pub config: TrainConfig,
    pub model: LinearModel,
}

impl SoftmaxRegression {
    pub fn new(config: TrainConfig, num_classes: usize, dim: usize, manifest_hash: [u8; 32]) -> Self {
        SoftmaxRegression {
            config,
            model: LinearModel::zeros(num_classes, dim, manifest_hash),
        }
    }
}

impl Backend for SoftmaxRegression {
    fn fit(
        &mut self,
        features: &[FeatureVector],
        labels: &[TechniqueLabel],
        weights: &[f64],
    ) -> Result<Vec<f64>, ModelError> {
        let out = train(
            features,
            labels,
            weights,
            self.model.num_classes(),
            self.model.dim(),
            *self.model.manifest_hash(),
            &self.config,
        )?;
        self.model = out.model;
        Ok(out.loss_trace)
    }

    fn predict_proba(&self, x: &FeatureVector) -> Result<Vec<f64>, ModelError> {
        self.model.predict_proba(x)
    }
}
