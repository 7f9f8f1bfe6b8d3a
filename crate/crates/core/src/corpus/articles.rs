use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::CorpusError;

/// A news article. Text has `\r\n` normalized to `\n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Article {
    id: u64,
    text: String,
    // byte offset of every char boundary, including text.len()
    boundaries: Vec<usize>,
}

impl Article {
    pub fn new(id: u64, text: String) -> Self {
        let text = normalize_newlines(text);
        let mut boundaries: Vec<usize> = text.char_indices().map(|(i, _)| i).collect();
        boundaries.push(text.len());
        Article {
            id,
            text,
            boundaries,
        }
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Length in Unicode scalar values.
    pub fn char_len(&self) -> usize {
        self.boundaries.len() - 1
    }

    /// Text between scalar offsets `[start, end)`, or `None` when out of range.
    pub fn slice(&self, start: usize, end: usize) -> Option<&str> {
        if start > end || end > self.char_len() {
            return None;
        }
        Some(&self.text[self.boundaries[start]..self.boundaries[end]])
    }

    pub fn chars(&self) -> Vec<char> {
        self.text.chars().collect()
    }
}

fn normalize_newlines(text: String) -> String {
    if text.contains("\r\n") {
        text.replace("\r\n", "\n")
    } else {
        text
    }
}

/// What [`load_articles`] saw besides the articles themselves.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub files_seen: usize,
    pub articles_loaded: usize,
    pub warnings: Vec<String>,
}

fn parse_article_id(file_name: &str) -> Option<u64> {
    let digits = file_name.strip_prefix("article")?.strip_suffix(".txt")?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Load every `article<ID>.txt` in `dir`, sorted by id.
///
/// Files whose names do not follow the pattern are skipped and noted in the
/// report. Non-UTF-8 content, empty files and duplicate ids are errors.
pub fn load_articles(dir: &Path) -> Result<(Vec<Article>, LoadReport), CorpusError> {
    let io_err = |source| CorpusError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut report = LoadReport::default();
    let mut candidates: Vec<(u64, PathBuf)> = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io_err)? {
        let entry = entry.map_err(io_err)?;
        let path = entry.path();
        if !path.is_file() {
            continue;
        }
        report.files_seen += 1;
        let name = entry.file_name();
        match name.to_str().and_then(parse_article_id) {
            Some(id) => candidates.push((id, path)),
            None => report.warnings.push(format!(
                "skipped {}: file name does not match article<ID>.txt",
                name.to_string_lossy()
            )),
        }
    }
    report.warnings.sort();
    candidates.sort();
    if candidates.is_empty() {
        report.warnings.push("no article files found".into());
    }
    for pair in candidates.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(CorpusError::DuplicateArticle {
                id: pair[0].0,
                first: pair[0].1.clone(),
                second: pair[1].1.clone(),
            });
        }
    }

    let articles = candidates
        .par_iter()
        .map(|(id, path)| read_article(*id, path))
        .collect::<Result<Vec<_>, _>>()?;
    report.articles_loaded = articles.len();
    Ok((articles, report))
}

fn read_article(id: u64, path: &Path) -> Result<Article, CorpusError> {
    let bytes = std::fs::read(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let text = String::from_utf8(bytes).map_err(|_| CorpusError::Decode {
        path: path.to_path_buf(),
    })?;
    if text.is_empty() {
        return Err(CorpusError::EmptyArticle {
            path: path.to_path_buf(),
        });
    }
    Ok(Article::new(id, text))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filename_parsing() {
        assert_eq!(parse_article_id("article7.txt"), Some(7));
        assert_eq!(parse_article_id("article111111112.txt"), Some(111111112));
        assert_eq!(parse_article_id("article.txt"), None);
        assert_eq!(parse_article_id("article7.labels"), None);
        assert_eq!(parse_article_id("article-7.txt"), None);
        assert_eq!(parse_article_id("notes.txt"), None);
    }

    #[test]
    fn crlf_normalized_before_offsets() {
        let a = Article::new(1, "ab\r\ncd".into());
        assert_eq!(a.text(), "ab\ncd");
        assert_eq!(a.char_len(), 5);
        assert_eq!(a.slice(3, 5), Some("cd"));
    }

    #[test]
    fn slice_bounds() {
        let a = Article::new(1, "añb".into());
        assert_eq!(a.slice(1, 2), Some("ñ"));
        assert_eq!(a.slice(0, 3), Some("añb"));
        assert_eq!(a.slice(0, 4), None);
        assert_eq!(a.slice(2, 1), None);
    }
}
