use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ingest::{ParsedInstruction, Upos};
use crate::model::{align_annotations, Corpus};

/// Patterns rarer than this are folded into "other" in summaries.
pub const TAIL_THRESHOLD: f64 = 0.005;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PosPattern(pub Vec<Upos>);

impl fmt::Display for PosPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, u) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(u.as_str())?;
        }
        Ok(())
    }
}

impl Serialize for PosPattern {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternFrequency {
    pub pattern: PosPattern,
    pub count: usize,
    pub frequency: f64,
    /// First unique sentence with this pattern.
    pub exemplar: String,
}

/// Ranked UPOS sequences over the unique sentences of `corpus`.
pub fn pos_pattern_frequencies(
    parses: &BTreeMap<String, ParsedInstruction>,
    corpus: &Corpus,
) -> Result<Vec<PatternFrequency>> {
    let aligned = align_annotations(corpus, parses);
    let mut seen = HashSet::new();
    // pattern string -> (pattern, count, exemplar)
    let mut table: BTreeMap<String, (PosPattern, usize, &str)> = BTreeMap::new();
    let mut n_unique = 0usize;
    for (rec, parse) in corpus.records().iter().zip(&aligned) {
        if !seen.insert(rec.clean_text.as_str()) {
            continue;
        }
        let parse = parse.ok_or_else(|| Error::invalid(format!("missing parse for record {}", rec.id)))?;
        n_unique += 1;
        let pattern = PosPattern(parse.upos_sequence());
        table
            .entry(pattern.to_string())
            .or_insert_with(|| (pattern, 0, rec.clean_text.as_str()))
            .1 += 1;
    }
    if n_unique == 0 {
        return Err(Error::EmptyCorpus);
    }
    // BTreeMap iteration is already lexicographic; a stable sort by count keeps that for ties
    let mut out: Vec<PatternFrequency> = table
        .into_values()
        .map(|(pattern, count, exemplar)| PatternFrequency {
            pattern,
            count,
            frequency: count as f64 / n_unique as f64,
            exemplar: exemplar.to_string(),
        })
        .collect();
    out.sort_by(|a, b| b.count.cmp(&a.count));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternSummary {
    pub n_unique: usize,
    pub n_patterns: usize,
    pub top: Vec<PatternFrequency>,
    pub other_count: usize,
    pub other_frequency: f64,
}

/// Keeps patterns at or above `min_frequency`; the rest become one "other" bucket.
pub fn summarize_patterns(freqs: &[PatternFrequency], min_frequency: f64) -> PatternSummary {
    let n_unique = freqs.iter().map(|f| f.count).sum();
    let (top, tail): (Vec<_>, Vec<_>) = freqs.iter().cloned().partition(|f| f.frequency >= min_frequency);
    let other_count: usize = tail.iter().map(|f| f.count).sum();
    PatternSummary {
        n_unique,
        n_patterns: freqs.len(),
        top,
        other_count,
        other_frequency: if n_unique == 0 { 0.0 } else { other_count as f64 / n_unique as f64 },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::TokenAnnotation;
    use crate::text::Cleaner;

    fn tagged(id: &str, text: &str, tags: &[Upos]) -> ParsedInstruction {
        let tokens = text
            .split(' ')
            .zip(tags)
            .enumerate()
            .map(|(i, (w, &upos))| TokenAnnotation {
                index: i + 1,
                surface: w.into(),
                lemma: w.into(),
                upos,
                head: if i == 0 { 0 } else { 1 },
                deprel: if i == 0 { "root".into() } else { "dep".into() },
            })
            .collect();
        ParsedInstruction::new(id, tokens).unwrap()
    }

    #[test]
    fn rt1_pattern() {
        use Upos::*;
        let c = Corpus::from_texts("rt1", &["place water bottle into white bowl"], &Cleaner::Default).unwrap();
        let parses = BTreeMap::from([(
            "r0".to_string(),
            tagged("r0", "place water bottle into white bowl", &[Verb, Noun, Noun, Adp, Adj, Noun]),
        )]);
        let f = pos_pattern_frequencies(&parses, &c).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].pattern.to_string(), "VERB NOUN NOUN ADP ADJ NOUN");
        assert_eq!(f[0].frequency, 1.0);
    }

    #[test]
    fn unique_only_and_ties() {
        use Upos::*;
        let texts = ["pick apple", "pick apple", "pick apple", "go", "stop"];
        let c = Corpus::from_texts("t", &texts, &Cleaner::Default).unwrap();
        // r0's duplicates carry no parse of their own
        let parses = BTreeMap::from([
            ("r0".to_string(), tagged("r0", "pick apple", &[Verb, Noun])),
            ("r3".to_string(), tagged("r3", "go", &[Verb])),
            ("r4".to_string(), tagged("r4", "stop", &[Intj])),
        ]);
        let f = pos_pattern_frequencies(&parses, &c).unwrap();
        let got: Vec<(String, usize)> = f.iter().map(|p| (p.pattern.to_string(), p.count)).collect();
        assert_eq!(got, [("INTJ".to_string(), 1), ("VERB".to_string(), 1), ("VERB NOUN".to_string(), 1)]);
        assert!((f.iter().map(|p| p.frequency).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn missing_parse_names_record() {
        let c = Corpus::from_texts("t", &["a", "b"], &Cleaner::Default).unwrap();
        let parses = BTreeMap::from([("r0".to_string(), tagged("r0", "a", &[Upos::X]))]);
        let err = pos_pattern_frequencies(&parses, &c).unwrap_err().to_string();
        assert!(err.contains("missing parse for record r1"), "{err}");
    }

    #[test]
    fn tail_folds_into_other() {
        let mk = |p: &str, count: usize, n: usize| PatternFrequency {
            pattern: PosPattern(p.split(' ').map(|t| t.parse().unwrap()).collect()),
            count,
            frequency: count as f64 / n as f64,
            exemplar: String::new(),
        };
        let freqs = vec![mk("VERB NOUN", 996, 1000), mk("VERB", 3, 1000), mk("NOUN", 1, 1000)];
        let s = summarize_patterns(&freqs, TAIL_THRESHOLD);
        assert_eq!(s.top.len(), 1);
        assert_eq!(s.other_count, 4);
        assert!((s.top[0].frequency + s.other_frequency - 1.0).abs() < 1e-12);
    }
}
