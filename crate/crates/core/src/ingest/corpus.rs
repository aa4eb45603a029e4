use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use super::{jsonl_lines, parse_json_object, string_field};
use crate::error::{Error, Result};
use crate::model::{Corpus, InstructionRecord};
use crate::text::{normalize_text, split_sentences, Cleaner};

#[derive(Debug, Clone)]
pub struct ReadOptions {
    pub cleaner: Cleaner,
    /// Overrides the per-line `"dataset"` field and the file-stem fallback.
    pub dataset_id: Option<String>,
    /// Split each record into sentences before normalization; pieces get ids `<id>#<k>`.
    pub split_sentences: bool,
}

impl Default for ReadOptions {
    fn default() -> Self {
        ReadOptions {
            cleaner: Cleaner::Default,
            dataset_id: None,
            split_sentences: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IngestSummary {
    pub kept: usize,
    /// Records whose text was empty after normalization.
    pub dropped: usize,
}

pub fn read_corpus(path: &Path, cleaner: &Cleaner) -> Result<Corpus> {
    let opts = ReadOptions {
        cleaner: cleaner.clone(),
        ..ReadOptions::default()
    };
    read_corpus_with(path, &opts).map(|(c, _)| c)
}

/// Reads a JSON-Lines corpus of `{"id": .., "text": .., "dataset"?: ..}` objects.
pub fn read_corpus_with(path: &Path, opts: &ReadOptions) -> Result<(Corpus, IngestSummary)> {
    let mut seen_ids = HashSet::new();
    let mut file_dataset: Option<String> = None;
    let mut pending = Vec::new();
    let mut summary = IngestSummary::default();

    for line in jsonl_lines(path)? {
        let (line_no, line) = line?;
        let obj = parse_json_object(path, line_no, &line)?;
        let id = string_field(path, line_no, &obj, "id")?;
        let text = string_field(path, line_no, &obj, "text")?;
        if id.is_empty() {
            return Err(Error::syntax(path, line_no, "empty id"));
        }
        if !seen_ids.insert(id.to_string()) {
            return Err(Error::DuplicateId {
                id: id.to_string(),
                line: line_no,
            });
        }
        if obj.contains_key("dataset") {
            let ds = string_field(path, line_no, &obj, "dataset")?;
            match &file_dataset {
                None => file_dataset = Some(ds.to_string()),
                Some(prev) if prev != ds && opts.dataset_id.is_none() => {
                    return Err(Error::syntax(
                        path,
                        line_no,
                        format!("mixed dataset ids {prev:?} and {ds:?}"),
                    ))
                }
                Some(_) => {}
            }
        }

        let pieces = if opts.split_sentences {
            split_sentences(text)
        } else {
            vec![text.to_string()]
        };
        let multi = pieces.len() > 1;
        for (k, piece) in pieces.into_iter().enumerate() {
            let piece_id = if multi { format!("{id}#{k}") } else { id.to_string() };
            if multi && !seen_ids.insert(piece_id.clone()) {
                return Err(Error::DuplicateId { id: piece_id, line: line_no });
            }
            let clean = normalize_text(&piece, &opts.cleaner);
            if clean.is_empty() {
                summary.dropped += 1;
                continue;
            }
            pending.push((piece_id, piece, clean));
        }
    }

    if summary.dropped > 0 {
        log::info!("{}: dropped {} records empty after cleaning", path.display(), summary.dropped);
    }
    let dataset_id = opts
        .dataset_id
        .clone()
        .or(file_dataset)
        .unwrap_or_else(|| dataset_from_path(path));
    let records: Vec<_> = pending
        .into_iter()
        .map(|(id, raw, clean)| InstructionRecord::from_clean(id, raw, clean, dataset_id.clone()))
        .collect();
    summary.kept = records.len();
    let corpus = Corpus::new(
        dataset_id,
        records,
        path.display().to_string(),
        opts.cleaner.id(),
    )?;
    Ok((corpus, summary))
}

fn dataset_from_path(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string())
}

/// Writes the normalized corpus; the output re-reads to the same clean texts.
pub fn write_corpus<W: Write>(corpus: &Corpus, mut out: W) -> std::io::Result<()> {
    for rec in corpus.records() {
        let line = serde_json::json!({
            "id": rec.id,
            "text": rec.clean_text,
            "dataset": rec.dataset_id,
        });
        writeln!(out, "{line}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let f = tempfile::Builder::new().suffix(".jsonl").tempfile().unwrap();
        fs::write(f.path(), contents).unwrap();
        f
    }

    #[test]
    fn reads_and_normalizes() {
        let f = write_tmp("{\"id\":\"r1\",\"text\":\"Pick the apple.\"}\n{\"id\":\"r2\",\"text\":\"  \"}\n");
        let (c, summary) = read_corpus_with(f.path(), &ReadOptions::default()).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.records()[0].id, "r1");
        assert_eq!(c.records()[0].clean_text, "pick the apple");
        assert_eq!(c.records()[0].raw_text, "Pick the apple.");
        assert_eq!(summary, IngestSummary { kept: 1, dropped: 1 });
    }

    #[test]
    fn duplicate_id_names_line() {
        let mut s = String::new();
        for i in 1..=9 {
            let id = if i == 3 || i == 9 { "r1".to_string() } else { format!("x{i}") };
            s.push_str(&format!("{{\"id\":\"{id}\",\"text\":\"t {i}\"}}\n"));
        }
        let f = write_tmp(&s);
        let err = read_corpus(f.path(), &Cleaner::Default).unwrap_err();
        assert_eq!(err.to_string(), "duplicate id r1 (line 9)");
    }

    #[test]
    fn empty_file_is_empty_corpus() {
        let f = write_tmp("");
        assert_eq!(read_corpus(f.path(), &Cleaner::Default).unwrap_err().to_string(), "empty corpus");
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let f = write_tmp("{\"id\":\"a\",\"text\":\"x\"}\n{\"id\": \"b\", \"text\": }\n");
        let err = read_corpus(f.path(), &Cleaner::Default).unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 2, .. }), "{err}");
        let f = write_tmp("{\"id\":\"a\"}\n");
        assert!(read_corpus(f.path(), &Cleaner::Default).unwrap_err().to_string().contains("missing field \"text\""));
    }

    #[test]
    fn dataset_resolution() {
        let f = write_tmp("{\"id\":\"a\",\"text\":\"x\",\"dataset\":\"rt1\"}\n{\"id\":\"b\",\"text\":\"y\",\"dataset\":\"rt1\"}\n");
        assert_eq!(read_corpus(f.path(), &Cleaner::Default).unwrap().dataset_id(), "rt1");
        let f = write_tmp("{\"id\":\"a\",\"text\":\"x\",\"dataset\":\"rt1\"}\n{\"id\":\"b\",\"text\":\"y\",\"dataset\":\"other\"}\n");
        assert!(read_corpus(f.path(), &Cleaner::Default).unwrap_err().to_string().contains("mixed dataset"));
        let opts = ReadOptions {
            dataset_id: Some("forced".into()),
            ..ReadOptions::default()
        };
        assert_eq!(read_corpus_with(f.path(), &opts).unwrap().0.dataset_id(), "forced");
    }

    #[test]
    fn sentence_splitting_on_request() {
        let f = write_tmp("{\"id\":\"a\",\"text\":\"Open the drawer. Close it.\"}\n");
        let opts = ReadOptions {
            split_sentences: true,
            ..ReadOptions::default()
        };
        let (c, _) = read_corpus_with(f.path(), &opts).unwrap();
        let ids: Vec<_> = c.records().iter().map(|r| (r.id.as_str(), r.clean_text.as_str())).collect();
        assert_eq!(ids, [("a#0", "open the drawer"), ("a#1", "close it")]);
    }

    #[test]
    fn write_then_read_is_stable() {
        let f = write_tmp("{\"id\":\"a\",\"text\":\"Pick   the Apple!\"}\n");
        let c = read_corpus(f.path(), &Cleaner::Default).unwrap();
        let mut buf = Vec::new();
        write_corpus(&c, &mut buf).unwrap();
        let g = write_tmp(std::str::from_utf8(&buf).unwrap());
        let again = read_corpus(g.path(), &Cleaner::Default).unwrap();
        assert_eq!(again.records()[0].clean_text, c.records()[0].clean_text);
        assert_eq!(again.dataset_id(), c.dataset_id());
    }
}
