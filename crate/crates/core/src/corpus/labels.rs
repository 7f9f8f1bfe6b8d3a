use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use super::{CorpusError, LabelErrorKind, Manifest, SpanAnnotation};

fn parse_int(field: &'static str, value: &str, line: usize) -> Result<u64, CorpusError> {
    let bad = || CorpusError::Label {
        line,
        kind: LabelErrorKind::BadInteger {
            field,
            value: value.to_string(),
        },
    };
    if value.is_empty() || !value.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    value.parse().map_err(|_| bad())
}

/// Parse label-file contents. Blank lines are skipped; the first malformed
/// line aborts with its 1-based line number.
pub fn parse_labels(text: &str, manifest: &Manifest) -> Result<Vec<SpanAnnotation>, CorpusError> {
    let mut out = Vec::new();
    for (i, raw_line) in text.split('\n').enumerate() {
        let line_no = i + 1;
        let line = raw_line.strip_suffix('\r').unwrap_or(raw_line);
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(CorpusError::Label {
                line: line_no,
                kind: LabelErrorKind::FieldCount(fields.len()),
            });
        }
        let article_id = parse_int("article_id", fields[0], line_no)?;
        let label = manifest.resolve(fields[1]).ok_or_else(|| CorpusError::Label {
            line: line_no,
            kind: LabelErrorKind::UnknownTechnique(fields[1].to_string()),
        })?;
        let start = parse_int("start", fields[2], line_no)? as usize;
        let end = parse_int("end", fields[3], line_no)? as usize;
        if start >= end {
            return Err(CorpusError::Label {
                line: line_no,
                kind: LabelErrorKind::StartNotBeforeEnd { start, end },
            });
        }
        out.push(SpanAnnotation {
            article_id,
            label,
            start,
            end,
        });
    }
    Ok(out)
}

pub fn parse_label_file(path: &Path, manifest: &Manifest) -> Result<Vec<SpanAnnotation>, CorpusError> {
    let bytes = std::fs::read(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let text = String::from_utf8(bytes).map_err(|_| CorpusError::Decode {
        path: path.to_path_buf(),
    })?;
    parse_labels(&text, manifest)
}

/// Render annotations as label-file text, one line each, using canonical
/// technique names.
pub fn serialize_labels(annotations: &[SpanAnnotation], manifest: &Manifest) -> String {
    let mut out = String::new();
    for a in annotations {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}",
            a.article_id,
            manifest.name(a.label),
            a.start,
            a.end
        );
    }
    out
}

pub fn write_label_file(
    path: &Path,
    annotations: &[SpanAnnotation],
    manifest: &Manifest,
) -> Result<(), CorpusError> {
    std::fs::write(path, serialize_labels(annotations, manifest)).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Number of annotations identical to an earlier one. Duplicates are kept;
/// this only counts them.
pub fn duplicate_annotations(annotations: &[SpanAnnotation]) -> usize {
    let mut seen = HashSet::new();
    annotations.iter().filter(|a| !seen.insert(**a)).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::TechniqueLabel;

    fn manifest() -> Manifest {
        Manifest::default_set()
    }

    #[test]
    fn parses_one_line() {
        let anns = parse_labels("7\tDoubt\t4\t20", &manifest()).unwrap();
        assert_eq!(
            anns,
            vec![SpanAnnotation {
                article_id: 7,
                label: TechniqueLabel::new(4),
                start: 4,
                end: 20
            }]
        );
    }

    #[test]
    fn start_after_end_reports_line() {
        let err = parse_labels("7\tDoubt\t20\t4", &manifest()).unwrap_err();
        assert_eq!(err.to_string(), "start ≥ end at line 1");
    }

    #[test]
    fn empty_file_is_empty() {
        assert!(parse_labels("", &manifest()).unwrap().is_empty());
        assert!(parse_labels("\n\n", &manifest()).unwrap().is_empty());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let m = manifest();
        let text = "1\tDoubt\t0\t3\n\n1\tDoubt\tx\t3\n";
        match parse_labels(text, &m).unwrap_err() {
            CorpusError::Label { line, kind } => {
                assert_eq!(line, 3);
                assert!(matches!(kind, LabelErrorKind::BadInteger { field: "start", .. }));
            }
            e => panic!("{e:?}"),
        }
        match parse_labels("1\tDoubt\t0", &m).unwrap_err() {
            CorpusError::Label { kind, .. } => assert_eq!(kind, LabelErrorKind::FieldCount(3)),
            e => panic!("{e:?}"),
        }
        match parse_labels("1\tSarcasm\t0\t2", &m).unwrap_err() {
            CorpusError::Label { kind, .. } => {
                assert_eq!(kind, LabelErrorKind::UnknownTechnique("Sarcasm".into()))
            }
            e => panic!("{e:?}"),
        }
        assert!(parse_labels("1\tDoubt\t-1\t2", &m).is_err());
        assert!(parse_labels("1\tDoubt\t5\t5", &m).is_err());
    }

    #[test]
    fn crlf_lines_accepted() {
        let anns = parse_labels("1\tDoubt\t0\t3\r\n2\tSlogans\t1\t2\r\n", &manifest()).unwrap();
        assert_eq!(anns.len(), 2);
        assert_eq!(anns[1].label, TechniqueLabel::new(11));
    }

    #[test]
    fn duplicates_counted_not_removed() {
        let anns = parse_labels("1\tDoubt\t0\t3\n1\tDoubt\t0\t3\n1\tDoubt\t0\t3\n1\tDoubt\t0\t4\n", &manifest()).unwrap();
        assert_eq!(anns.len(), 4);
        assert_eq!(duplicate_annotations(&anns), 2);
    }
}
