//! Task-format corpus ingestion.
//!
//! Layout: a directory of `article<ID>.txt` files and one or more label files
//! with four tab-separated columns `article_id  technique  start  end`.
//!
//! Offsets count Unicode scalar values (Rust `char`s), not bytes, and are
//! measured against the article text after `\r\n` has been normalized to
//! `\n`.

mod articles;
mod labels;
pub mod manifest;

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use articles::{load_articles, Article, LoadReport};
pub use labels::{duplicate_annotations, parse_label_file, parse_labels, serialize_labels, write_label_file};
pub use manifest::{Manifest, ManifestEntry, TechniqueLabel, DEFAULT_CLASSES};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path} is not valid UTF-8")]
    Decode { path: PathBuf },
    #[error("article id {id} appears in both {first} and {second}")]
    DuplicateArticle {
        id: u64,
        first: PathBuf,
        second: PathBuf,
    },
    #[error("article file {path} is empty")]
    EmptyArticle { path: PathBuf },
    #[error("{kind} at line {line}")]
    Label { line: usize, kind: LabelErrorKind },
    #[error("manifest error: {0}")]
    Manifest(String),
    #[error("{} invalid annotation(s): {}", .0.len(), join_issues(.0))]
    Validation(Vec<ValidationIssue>),
}

fn join_issues(issues: &[ValidationIssue]) -> String {
    issues
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelErrorKind {
    FieldCount(usize),
    BadInteger { field: &'static str, value: String },
    StartNotBeforeEnd { start: usize, end: usize },
    UnknownTechnique(String),
}

impl fmt::Display for LabelErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelErrorKind::FieldCount(n) => write!(f, "expected 4 tab-separated fields, found {n}"),
            LabelErrorKind::BadInteger { field, value } => {
                write!(f, "{field} is not a base-10 integer: {value:?}")
            }
            LabelErrorKind::StartNotBeforeEnd { .. } => write!(f, "start ≥ end"),
            LabelErrorKind::UnknownTechnique(name) => write!(f, "unknown technique {name:?}"),
        }
    }
}

/// A problem found by [`extract_samples`]. `index` is the annotation's
/// position in the input collection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ValidationIssue {
    MissingArticle {
        index: usize,
        article_id: u64,
    },
    OutOfRange {
        index: usize,
        article_id: u64,
        start: usize,
        end: usize,
        text_len: usize,
    },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::MissingArticle { index, article_id } => {
                write!(f, "annotation {index} references missing article {article_id}")
            }
            ValidationIssue::OutOfRange {
                index,
                article_id,
                start,
                end,
                text_len,
            } => write!(
                f,
                "annotation {index} span {start}..{end} exceeds article {article_id} length {text_len}"
            ),
        }
    }
}

/// One labeled propaganda instance: `[start, end)` in article `article_id`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpanAnnotation {
    pub article_id: u64,
    pub label: TechniqueLabel,
    pub start: usize,
    pub end: usize,
}

/// An annotation with its extracted text.
///
/// `input_text` is what the classifier sees. It starts out equal to
/// `span_text` and is replaced by the expanded window when context
/// expansion is active; `window` records the character range it covers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledSample {
    pub annotation: SpanAnnotation,
    pub span_text: String,
    pub input_text: String,
    pub window: (usize, usize),
}

impl LabeledSample {
    pub fn label(&self) -> TechniqueLabel {
        self.annotation.label
    }
}

/// Slice every annotation out of its article.
///
/// Unlike label parsing this does not stop at the first problem: every
/// missing article and out-of-range span is collected into a single
/// [`CorpusError::Validation`].
pub fn extract_samples(
    articles: &[Article],
    annotations: &[SpanAnnotation],
) -> Result<Vec<LabeledSample>, CorpusError> {
    let by_id: std::collections::HashMap<u64, &Article> =
        articles.iter().map(|a| (a.id(), a)).collect();

    let mut issues = Vec::new();
    let mut samples = Vec::with_capacity(annotations.len());
    for (index, ann) in annotations.iter().enumerate() {
        let Some(article) = by_id.get(&ann.article_id) else {
            issues.push(ValidationIssue::MissingArticle {
                index,
                article_id: ann.article_id,
            });
            continue;
        };
        match article.slice(ann.start, ann.end) {
            Some(text) if ann.start < ann.end => samples.push(LabeledSample {
                annotation: *ann,
                span_text: text.to_string(),
                input_text: text.to_string(),
                window: (ann.start, ann.end),
            }),
            _ => issues.push(ValidationIssue::OutOfRange {
                index,
                article_id: ann.article_id,
                start: ann.start,
                end: ann.end,
                text_len: article.char_len(),
            }),
        }
    }
    if issues.is_empty() {
        Ok(samples)
    } else {
        Err(CorpusError::Validation(issues))
    }
}
