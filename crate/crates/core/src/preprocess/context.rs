use serde::{Deserialize, Serialize};

use super::PreprocessError;
use crate::corpus::{Article, LabeledSample};

/// How far a span is widened before classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContextMode {
    #[default]
    None,
    /// Out to the enclosing `.`, `?`, `!` or newline.
    Sentence,
    /// As `Sentence`, with `,` also acting as a boundary.
    Subsentence,
}

impl ContextMode {
    pub fn is_delimiter(self, c: char) -> bool {
        match self {
            ContextMode::None => false,
            ContextMode::Sentence => matches!(c, '.' | '?' | '!' | '\n'),
            ContextMode::Subsentence => matches!(c, '.' | '?' | '!' | '\n' | ','),
        }
    }
}

/// Marker inserted before the span when span marking is enabled.
pub const SPAN_OPEN: &str = "[SPAN] ";
/// Marker inserted after the span when span marking is enabled.
pub const SPAN_CLOSE: &str = " [/SPAN]";

/// Widen `[start, end)` to the enclosing sentence or subsentence.
///
/// The window starts just after the last delimiter before `start` (or at 0)
/// and ends just after the first delimiter at or after the span's last
/// character (or at the end of the text). A span that already ends on a
/// delimiter is therefore not extended, which makes expansion idempotent.
/// Whitespace inside the window is kept.
pub fn expand_span_chars(
    text: &[char],
    start: usize,
    end: usize,
    mode: ContextMode,
) -> Result<(usize, usize), PreprocessError> {
    let len = text.len();
    if start >= end || end > len {
        return Err(PreprocessError::Range { start, end, len });
    }
    if mode == ContextMode::None {
        return Ok((start, end));
    }
    let new_start = text[..start]
        .iter()
        .rposition(|&c| mode.is_delimiter(c))
        .map_or(0, |i| i + 1);
    let new_end = text[end - 1..]
        .iter()
        .position(|&c| mode.is_delimiter(c))
        .map_or(len, |i| end - 1 + i + 1);
    Ok((new_start, new_end))
}

/// [`expand_span_chars`] over a string, with offsets in Unicode scalars.
pub fn expand_span(
    text: &str,
    start: usize,
    end: usize,
    mode: ContextMode,
) -> Result<(usize, usize), PreprocessError> {
    let chars: Vec<char> = text.chars().collect();
    expand_span_chars(&chars, start, end, mode)
}

/// Replace the sample's `input_text` with its expanded window. With
/// `mark_span` the original span is wrapped in [`SPAN_OPEN`]/[`SPAN_CLOSE`].
pub fn apply_context(
    sample: &mut LabeledSample,
    article: &Article,
    mode: ContextMode,
    mark_span: bool,
) -> Result<(), PreprocessError> {
    let ann = sample.annotation;
    let chars = article.chars();
    let (ws, we) = expand_span_chars(&chars, ann.start, ann.end, mode)?;
    let slice = |a: usize, b: usize| chars[a..b].iter().collect::<String>();
    sample.input_text = if mark_span {
        format!(
            "{}{SPAN_OPEN}{}{SPAN_CLOSE}{}",
            slice(ws, ann.start),
            slice(ann.start, ann.end),
            slice(ann.end, we)
        )
    } else {
        slice(ws, we)
    };
    sample.window = (ws, we);
    Ok(())
}
