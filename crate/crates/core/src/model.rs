//! Corpus domain types and corpus-level counting.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{normalize_text, Cleaner};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstructionRecord {
    pub id: String,
    pub raw_text: String,
    pub clean_text: String,
    pub tokens: Vec<String>,
    pub dataset_id: String,
}

impl InstructionRecord {
    pub fn new(id: impl Into<String>, raw_text: impl Into<String>, dataset_id: impl Into<String>, cleaner: &Cleaner) -> Self {
        let raw_text = raw_text.into();
        let clean_text = normalize_text(&raw_text, cleaner);
        Self::from_clean(id, raw_text, clean_text, dataset_id)
    }

    /// Builds a record from text that is already normalized.
    pub fn from_clean(
        id: impl Into<String>,
        raw_text: impl Into<String>,
        clean_text: impl Into<String>,
        dataset_id: impl Into<String>,
    ) -> Self {
        let clean_text = clean_text.into();
        let tokens = if clean_text.is_empty() {
            Vec::new()
        } else {
            clean_text.split(' ').map(str::to_string).collect()
        };
        InstructionRecord {
            id: id.into(),
            raw_text: raw_text.into(),
            clean_text,
            tokens,
            dataset_id: dataset_id.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    dataset_id: String,
    records: Vec<InstructionRecord>,
    source_path: String,
    cleaner_id: String,
}

impl Corpus {
    /// Validates record invariants: non-empty, shared dataset id, unique ids.
    pub fn new(
        dataset_id: impl Into<String>,
        records: Vec<InstructionRecord>,
        source_path: impl Into<String>,
        cleaner_id: impl Into<String>,
    ) -> Result<Self> {
        let dataset_id = dataset_id.into();
        if records.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut seen = HashSet::with_capacity(records.len());
        for (i, rec) in records.iter().enumerate() {
            if rec.id.is_empty() {
                return Err(Error::invalid(format!("record {i} has an empty id")));
            }
            if rec.dataset_id != dataset_id {
                return Err(Error::invalid(format!(
                    "record {} belongs to dataset {:?}, expected {:?}",
                    rec.id, rec.dataset_id, dataset_id
                )));
            }
            if !seen.insert(rec.id.as_str()) {
                return Err(Error::DuplicateId {
                    id: rec.id.clone(),
                    line: i + 1,
                });
            }
        }
        Ok(Corpus {
            dataset_id,
            records,
            source_path: source_path.into(),
            cleaner_id: cleaner_id.into(),
        })
    }

    /// Convenience constructor for in-memory corpora; ids are `r0`, `r1`, ...
    pub fn from_texts<S: AsRef<str>>(dataset_id: &str, texts: &[S], cleaner: &Cleaner) -> Result<Self> {
        let records = texts
            .iter()
            .enumerate()
            .map(|(i, t)| InstructionRecord::new(format!("r{i}"), t.as_ref(), dataset_id, cleaner))
            .collect();
        Corpus::new(dataset_id, records, "<memory>", cleaner.id())
    }

    pub fn dataset_id(&self) -> &str {
        &self.dataset_id
    }

    pub fn records(&self) -> &[InstructionRecord] {
        &self.records
    }

    pub fn source_path(&self) -> &str {
        &self.source_path
    }

    pub fn cleaner_id(&self) -> &str {
        &self.cleaner_id
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&InstructionRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    pub fn id_set(&self) -> HashSet<&str> {
        self.records.iter().map(|r| r.id.as_str()).collect()
    }

    /// Appends another corpus of the same dataset. Ids must stay unique.
    pub fn concat(&self, other: &Corpus) -> Result<Corpus> {
        let mut records = self.records.clone();
        records.extend(other.records.iter().cloned());
        Corpus::new(self.dataset_id.clone(), records, self.source_path.clone(), self.cleaner_id.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub n_sentences: usize,
    pub n_unique: usize,
    pub pct_unique: f64,
    pub n_unigrams: usize,
    /// word count -> number of sentences with that many words
    pub length_histogram: BTreeMap<usize, usize>,
}

pub fn compute_stats(corpus: &Corpus) -> Result<CorpusStats> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut unique = HashSet::new();
    let mut unigrams = HashSet::new();
    let mut length_histogram = BTreeMap::new();
    for rec in corpus.records() {
        unique.insert(rec.clean_text.as_str());
        unigrams.extend(rec.tokens.iter().map(String::as_str));
        *length_histogram.entry(rec.tokens.len()).or_insert(0) += 1;
    }
    let n_sentences = corpus.len();
    Ok(CorpusStats {
        n_sentences,
        n_unique: unique.len(),
        pct_unique: unique.len() as f64 / n_sentences as f64,
        n_unigrams: unigrams.len(),
        length_histogram,
    })
}

/// First occurrence of every distinct `clean_text`, in corpus order.
pub fn unique_sentences(corpus: &Corpus) -> Corpus {
    let mut seen = HashSet::new();
    let records: Vec<_> = corpus
        .records()
        .iter()
        .filter(|r| seen.insert(r.clean_text.as_str()))
        .cloned()
        .collect();
    Corpus {
        dataset_id: corpus.dataset_id.clone(),
        records,
        source_path: corpus.source_path.clone(),
        cleaner_id: corpus.cleaner_id.clone(),
    }
}

/// Annotation for every record, in corpus order. A record without its own
/// entry borrows the first entry found among records with the same `clean_text`.
pub fn align_annotations<'a, T>(corpus: &Corpus, annotations: &'a BTreeMap<String, T>) -> Vec<Option<&'a T>> {
    let mut by_text: HashMap<&str, &'a T> = HashMap::new();
    for rec in corpus.records() {
        if let Some(a) = annotations.get(&rec.id) {
            by_text.entry(rec.clean_text.as_str()).or_insert(a);
        }
    }
    corpus
        .records()
        .iter()
        .map(|r| annotations.get(&r.id).or_else(|| by_text.get(r.clean_text.as_str()).copied()))
        .collect()
}
