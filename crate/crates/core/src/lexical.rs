//! Duplication and lexical diversity: gzip compression ratio, pairwise string
//! similarity and cross-dataset vocabulary overlap.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::hash::Hash;
use std::io::Write;

use flate2::write::GzEncoder;
use flate2::Compression;
use serde::{Deserialize, Serialize};

use crate::audit::sampling::{pairwise_mean_by, MetricValue, SamplingPlan};
use crate::error::{Error, Result};
use crate::ingest::{ParsedInstruction, Upos};
use crate::model::{unique_sentences, Corpus, InstructionRecord};

pub const GZIP_LEVEL: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricId {
    RougeL,
    Bleu4,
    Jaccard,
    Levenshtein,
    Bertscore,
    TreeKernel,
}

impl MetricId {
    pub fn as_str(self) -> &'static str {
        match self {
            MetricId::RougeL => "rouge_l",
            MetricId::Bleu4 => "bleu4",
            MetricId::Jaccard => "jaccard",
            MetricId::Levenshtein => "levenshtein",
            MetricId::Bertscore => "bertscore",
            MetricId::TreeKernel => "tree_kernel",
        }
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairwiseScore {
    pub metric_id: MetricId,
    pub value: f64,
}

/// Uncompressed bytes of all clean texts joined by `\n`, over gzip (level 6) output bytes.
pub fn compression_ratio(corpus: &Corpus) -> Result<f64> {
    let joined = corpus
        .records()
        .iter()
        .map(|r| r.clean_text.as_str())
        .collect::<Vec<_>>()
        .join("\n");
    compression_ratio_bytes(joined.as_bytes())
}

pub fn compression_ratio_bytes(raw: &[u8]) -> Result<f64> {
    if raw.is_empty() {
        return Err(Error::invalid("compression ratio of empty text"));
    }
    let mut enc = GzEncoder::new(Vec::with_capacity(raw.len() / 4 + 64), Compression::new(GZIP_LEVEL));
    enc.write_all(raw).and_then(|_| enc.flush()).map_err(|e| Error::invalid(format!("gzip failed: {e}")))?;
    let compressed = enc.finish().map_err(|e| Error::invalid(format!("gzip failed: {e}")))?;
    Ok(raw.len() as f64 / compressed.len() as f64)
}

fn require_non_empty<T>(a: &[T], b: &[T]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("pairwise metric on an empty token sequence"));
    }
    Ok(())
}

pub(crate) fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { prev[j + 1].max(cur[j]) };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// LCS-based F1 (beta = 1) with recall over `a` and precision over `b`.
pub fn rouge_l<T: PartialEq>(a: &[T], b: &[T]) -> Result<f64> {
    require_non_empty(a, b)?;
    let lcs = lcs_len(a, b);
    if lcs == 0 {
        return Ok(0.0);
    }
    let precision = lcs as f64 / b.len() as f64;
    let recall = lcs as f64 / a.len() as f64;
    Ok(2.0 * precision * recall / (precision + recall))
}

fn ngram_counts<T: Hash + Eq>(tokens: &[T], n: usize) -> HashMap<&[T], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts.entry(w).or_insert(0) += 1;
        }
    }
    counts
}

/// Sentence BLEU-4 of `candidate` against a single `reference`.
///
/// Orders longer than the candidate are dropped and the remaining weights
/// renormalized. A zero precision at order n >= 2 is floored at
/// `1 / (2 * candidate n-grams)`; a zero unigram precision gives 0.
pub fn bleu4_directional<T: Hash + Eq>(candidate: &[T], reference: &[T]) -> f64 {
    let mut log_sum = 0.0;
    let mut orders = 0usize;
    for n in 1..=4 {
        if candidate.len() < n {
            break;
        }
        let total = candidate.len() - n + 1;
        let cand = ngram_counts(candidate, n);
        let refs = ngram_counts(reference, n);
        let matched: usize = cand
            .iter()
            .map(|(g, &c)| c.min(refs.get(g).copied().unwrap_or(0)))
            .sum();
        let precision = if matched == 0 {
            if n == 1 {
                return 0.0;
            }
            1.0 / (2.0 * total as f64)
        } else {
            matched as f64 / total as f64
        };
        log_sum += precision.ln();
        orders += 1;
    }
    if orders == 0 {
        return 0.0;
    }
    let c = candidate.len() as f64;
    let r = reference.len() as f64;
    let brevity = if c > r { 1.0 } else { (1.0 - r / c).exp() };
    brevity * (log_sum / orders as f64).exp()
}

/// Symmetrized BLEU-4: mean of both directions.
pub fn bleu4<T: Hash + Eq>(a: &[T], b: &[T]) -> Result<f64> {
    require_non_empty(a, b)?;
    Ok((bleu4_directional(a, b) + bleu4_directional(b, a)) / 2.0)
}

/// Token-set Jaccard similarity.
pub fn jaccard<T: Hash + Eq>(a: &[T], b: &[T]) -> Result<f64> {
    require_non_empty(a, b)?;
    let sa: HashSet<&T> = a.iter().collect();
    let sb: HashSet<&T> = b.iter().collect();
    let inter = sa.intersection(&sb).count();
    let union = sa.len() + sb.len() - inter;
    Ok(inter as f64 / union as f64)
}

/// Character-level edit distance (unit-cost insert, delete, substitute).
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Score of one lexical metric on a record pair.
pub fn pair_score(metric: MetricId, a: &InstructionRecord, b: &InstructionRecord) -> Result<f64> {
    match metric {
        MetricId::RougeL => rouge_l(&a.tokens, &b.tokens),
        MetricId::Bleu4 => bleu4(&a.tokens, &b.tokens),
        MetricId::Jaccard => jaccard(&a.tokens, &b.tokens),
        MetricId::Levenshtein => Ok(levenshtein(&a.clean_text, &b.clean_text) as f64),
        MetricId::Bertscore | MetricId::TreeKernel => Err(Error::invalid(format!(
            "{metric} needs annotations; it is not a lexical metric"
        ))),
    }
}

/// Mean pairwise lexical score over seeded samples of the corpus.
/// With `on_unique`, samples are drawn from unique sentences only.
pub fn pairwise_mean(corpus: &Corpus, metric: MetricId, plan: &SamplingPlan, on_unique: bool) -> Result<MetricValue> {
    let unique;
    let records = if on_unique {
        unique = unique_sentences(corpus);
        unique.records()
    } else {
        corpus.records()
    };
    pairwise_mean_by(records, plan, metric.as_str(), |a, b| pair_score(metric, a, b))
}

/// Lemmas with the given UPOS across a set of parses.
pub fn pos_vocabulary<'a, I>(parses: I, category: Upos) -> BTreeSet<String>
where
    I: IntoIterator<Item = &'a ParsedInstruction>,
{
    parses
        .into_iter()
        .flat_map(|p| p.tokens.iter())
        .filter(|t| t.upos == category)
        .map(|t| t.lemma.to_lowercase())
        .collect()
}

/// Dataset x dataset count of shared lemmas; the diagonal is each dataset's vocabulary size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapMatrix {
    pub category: Upos,
    pub datasets: Vec<String>,
    pub counts: Vec<Vec<usize>>,
    /// Lemmas present in every dataset.
    pub shared_by_all: BTreeSet<String>,
}

pub fn overlap_from_vocabularies(category: Upos, vocabularies: &[(String, BTreeSet<String>)]) -> OverlapMatrix {
    let counts = vocabularies
        .iter()
        .map(|(_, a)| vocabularies.iter().map(|(_, b)| a.intersection(b).count()).collect())
        .collect();
    let shared_by_all = match vocabularies.split_first() {
        Some(((_, first), rest)) => first
            .iter()
            .filter(|w| rest.iter().all(|(_, v)| v.contains(*w)))
            .cloned()
            .collect(),
        None => BTreeSet::new(),
    };
    OverlapMatrix {
        category,
        datasets: vocabularies.iter().map(|(d, _)| d.clone()).collect(),
        counts,
        shared_by_all,
    }
}

pub fn lexical_overlap(
    corpora: &[(&Corpus, Option<&BTreeMap<String, ParsedInstruction>>)],
    category: Upos,
) -> Result<OverlapMatrix> {
    let mut vocabularies = Vec::with_capacity(corpora.len());
    for (corpus, parses) in corpora {
        let parses = parses
            .filter(|p| !p.is_empty())
            .ok_or_else(|| Error::invalid(format!("missing parses for dataset {}", corpus.dataset_id())))?;
        let ids = corpus.id_set();
        let vocab = pos_vocabulary(parses.values().filter(|p| ids.contains(p.record_id.as_str())), category);
        vocabularies.push((corpus.dataset_id().to_string(), vocab));
    }
    Ok(overlap_from_vocabularies(category, &vocabularies))
}
