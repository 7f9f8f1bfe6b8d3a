//! Span-level propaganda technique classification toolkit.
//!
//! The crate covers the whole path from a task-format corpus to an evaluation
//! report:
//!
//! - [`corpus`]: article files, tab-separated span labels and the label-set
//!   manifest that fixes class order.
//! - [`stats`]: class distribution and per-class span-length box statistics.
//! - [`preprocess`]: seeded undersampling, sentence/subsentence context
//!   expansion, tokenization and hashed bag-of-words features.
//! - [`weights`]: inverse-frequency class weights for cost-sensitive training.
//! - [`model`]: softmax regression trained with a class-weighted
//!   cross-entropy loss.
//! - [`eval`]: confusion matrix, per-class/micro/macro F1 and performance
//!   buckets.
//! - [`experiment`]: the config-driven strategy-matrix runner behind the
//!   `spanclf` command line tool.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod model;
pub mod preprocess;
pub mod stats;
pub mod weights;

pub use error::{Error, Result};
