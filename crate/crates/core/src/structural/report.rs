use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::detect::{detect_structures, StructureLabel};
use crate::error::{Error, Result};
use crate::ingest::{GoldStructureLabels, ParsedInstruction};
use crate::lexicons::Lexicons;
use crate::model::{align_annotations, Corpus};

/// Binomial standard error of a proportion estimated from `m` items.
pub fn binomial_se(p: f64, m: usize) -> f64 {
    if m == 0 {
        return 0.0;
    }
    (p * (1.0 - p) / m as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlagStats {
    pub count: usize,
    pub fraction: f64,
    /// Detector/gold disagreement rate on the gold subset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disagreement: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub se: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoldSummary {
    pub annotator_id: String,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub n_sentences: usize,
    pub flags: BTreeMap<String, FlagStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gold: Option<GoldSummary>,
}

/// Detector labels for every record in corpus order. Duplicates share a parse.
pub fn structure_labels(
    corpus: &Corpus,
    parses: &BTreeMap<String, ParsedInstruction>,
    lex: &Lexicons,
) -> Result<Vec<StructureLabel>> {
    let aligned = align_annotations(corpus, parses);
    if let Some(i) = aligned.iter().position(Option::is_none) {
        return Err(Error::invalid(format!("missing parse for record {}", corpus.records()[i].id)));
    }
    Ok(corpus
        .records()
        .par_iter()
        .zip(aligned.par_iter())
        .map(|(rec, p)| detect_structures(p.expect("checked above"), &rec.clean_text, lex))
        .collect())
}

pub fn structure_report(
    corpus: &Corpus,
    parses: &BTreeMap<String, ParsedInstruction>,
    gold: Option<&GoldStructureLabels>,
    lex: &Lexicons,
) -> Result<StructureReport> {
    let labels = structure_labels(corpus, parses, lex)?;
    let n = labels.len();
    let mut disagreements = [0usize; 4];
    let mut m = 0;
    if let Some(g) = gold {
        let index: BTreeMap<&str, usize> = corpus.records().iter().enumerate().map(|(i, r)| (r.id.as_str(), i)).collect();
        for (id, truth) in &g.labels {
            let i = *index
                .get(id.as_str())
                .ok_or_else(|| Error::invalid(format!("gold id {id} not in corpus")))?;
            m += 1;
            for (k, (a, b)) in labels[i].flags().iter().zip(truth.flags()).enumerate() {
                if *a != b {
                    disagreements[k] += 1;
                }
            }
        }
    }
    let mut flags = BTreeMap::new();
    for (k, name) in StructureLabel::FLAGS.iter().enumerate() {
        let count = labels.iter().filter(|l| l.flags()[k]).count();
        let (disagreement, se) = match gold {
            Some(_) if m > 0 => {
                let p = disagreements[k] as f64 / m as f64;
                (Some(p), Some(binomial_se(p, m)))
            }
            _ => (None, None),
        };
        flags.insert(
            name.to_string(),
            FlagStats {
                count,
                fraction: count as f64 / n as f64,
                disagreement,
                se,
            },
        );
    }
    Ok(StructureReport {
        n_sentences: n,
        flags,
        gold: gold.map(|g| GoldSummary {
            annotator_id: g.annotator_id.clone(),
            m,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{TokenAnnotation, Upos};
    use crate::text::Cleaner;

    fn one_verb(id: &str, w: &str) -> ParsedInstruction {
        ParsedInstruction::new(
            id,
            vec![TokenAnnotation {
                index: 1,
                surface: w.into(),
                lemma: w.into(),
                upos: Upos::Verb,
                head: 0,
                deprel: "root".into(),
            }],
        )
        .unwrap()
    }

    #[test]
    fn se_formula() {
        assert!((binomial_se(0.05, 500) - 0.009746794).abs() < 1e-6);
        assert_eq!(binomial_se(0.0, 500), 0.0);
    }

    #[test]
    fn counts_and_gold() {
        let c = Corpus::from_texts("t", &["repeat", "go", "go"], &Cleaner::Default).unwrap();
        let parses = BTreeMap::from([("r0".to_string(), one_verb("r0", "repeat")), ("r1".to_string(), one_verb("r1", "go"))]);
        let r = structure_report(&c, &parses, None, &Lexicons::default()).unwrap();
        assert_eq!(r.n_sentences, 3);
        assert_eq!(r.flags["cycle"].count, 1);
        assert!((r.flags["cycle"].fraction - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.flags["negation"].se, None);

        let gold = GoldStructureLabels {
            labels: BTreeMap::from([
                ("r0".to_string(), StructureLabel { cycle: true, ..Default::default() }),
                ("r2".to_string(), StructureLabel { cycle: true, ..Default::default() }),
            ]),
            annotator_id: "a1".into(),
        };
        let r = structure_report(&c, &parses, Some(&gold), &Lexicons::default()).unwrap();
        assert_eq!(r.flags["cycle"].disagreement, Some(0.5));
        assert!((r.flags["cycle"].se.unwrap() - (0.25f64 / 2.0).sqrt()).abs() < 1e-15);
        assert_eq!(r.flags["negation"].se, Some(0.0));
        assert_eq!(r.gold.as_ref().unwrap().m, 2);
    }

    #[test]
    fn missing_parse_is_an_error() {
        let c = Corpus::from_texts("t", &["a", "b"], &Cleaner::Default).unwrap();
        let parses = BTreeMap::from([("r0".to_string(), one_verb("r0", "a"))]);
        assert!(structure_report(&c, &parses, None, &Lexicons::default()).is_err());
    }
}
