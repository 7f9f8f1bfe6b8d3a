//! Learning-scheme preprocessing: undersampling of frequent classes, context
//! expansion around spans, and the text features fed to the classifier.

mod context;
mod features;
mod undersample;

use thiserror::Error;

pub use context::{apply_context, expand_span, expand_span_chars, ContextMode, SPAN_CLOSE, SPAN_OPEN};
pub use features::{featurize, tokenize, FeatureVector, DEFAULT_FEATURE_DIM, HASH_SEED};
pub use undersample::{
    retained_count, undersample, undersample_indices, KeepFractions, UndersampleConfig,
};

#[derive(Debug, Error, PartialEq)]
pub enum PreprocessError {
    #[error("keep fraction for {class:?} must be in (0, 1], got {value}")]
    InvalidFraction { class: String, value: f64 },
    #[error("undersample config names unknown class {0:?}")]
    UnknownClass(String),
    #[error("span {start}..{end} invalid for text of length {len}")]
    Range { start: usize, end: usize, len: usize },
    #[error("feature dimension must be a power of two, got {0}")]
    DimNotPowerOfTwo(usize),
}
