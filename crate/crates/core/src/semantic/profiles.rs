use std::collections::BTreeMap;

use serde::Serialize;

use crate::ingest::{ParsedInstruction, Upos};
use crate::lexicons::Lexicons;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AdverbialClass {
    Directional,
    Locative,
    Manner,
    Temporal,
    Other,
}

impl AdverbialClass {
    pub const ALL: [AdverbialClass; 5] = [
        AdverbialClass::Directional,
        AdverbialClass::Locative,
        AdverbialClass::Manner,
        AdverbialClass::Temporal,
        AdverbialClass::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AdverbialClass::Directional => "directional",
            AdverbialClass::Locative => "locative",
            AdverbialClass::Manner => "manner",
            AdverbialClass::Temporal => "temporal",
            AdverbialClass::Other => "other",
        }
    }
}

/// First matching list wins, in the order directional, locative, manner, temporal.
pub fn classify_modifier(lemma: &str, lex: &Lexicons) -> AdverbialClass {
    if lex.directional.contains(lemma) {
        AdverbialClass::Directional
    } else if lex.locative.contains(lemma) {
        AdverbialClass::Locative
    } else if lex.manner.contains(lemma) {
        AdverbialClass::Manner
    } else if lex.temporal.contains(lemma) {
        AdverbialClass::Temporal
    } else {
        AdverbialClass::Other
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AdverbialEntry {
    pub class: AdverbialClass,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct AdverbialProfile {
    pub entries: BTreeMap<String, AdverbialEntry>,
}

impl AdverbialProfile {
    pub fn class_totals(&self) -> BTreeMap<AdverbialClass, u64> {
        let mut out: BTreeMap<AdverbialClass, u64> = AdverbialClass::ALL.iter().map(|&c| (c, 0)).collect();
        for e in self.entries.values() {
            *out.entry(e.class).or_default() += e.count;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct NumericProfile {
    pub counts: BTreeMap<String, u64>,
}

/// Counts ADV tokens and the ADP case markers of oblique modifiers.
pub fn adverbial_profile<'a, I>(parses: I, lex: &Lexicons) -> AdverbialProfile
where
    I: IntoIterator<Item = &'a ParsedInstruction>,
{
    let mut entries: BTreeMap<String, AdverbialEntry> = BTreeMap::new();
    for p in parses {
        for t in &p.tokens {
            let counted = match t.upos {
                Upos::Adv => true,
                Upos::Adp => t.base_deprel() == "case" && p.head_of(t).is_some_and(|h| h.base_deprel() == "obl"),
                _ => false,
            };
            if !counted {
                continue;
            }
            let lemma = t.lemma.to_lowercase();
            let class = classify_modifier(&lemma, lex);
            entries.entry(lemma).or_insert(AdverbialEntry { class, count: 0 }).count += 1;
        }
    }
    AdverbialProfile { entries }
}

/// Counts NUM tokens and numeral-lexicon words, keyed by lemma.
pub fn numeric_profile<'a, I>(parses: I, lex: &Lexicons) -> NumericProfile
where
    I: IntoIterator<Item = &'a ParsedInstruction>,
{
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for p in parses {
        for t in &p.tokens {
            let lemma = t.lemma.to_lowercase();
            if t.upos == Upos::Num || lex.numerals.contains(&lemma) {
                *counts.entry(lemma).or_default() += 1;
            }
        }
    }
    NumericProfile { counts }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::TokenAnnotation;

    fn parse(rows: &[(&str, Upos, usize, &str)]) -> ParsedInstruction {
        let tokens = rows
            .iter()
            .enumerate()
            .map(|(i, &(w, upos, head, deprel))| TokenAnnotation {
                index: i + 1,
                surface: w.into(),
                lemma: w.into(),
                upos,
                head,
                deprel: deprel.into(),
            })
            .collect();
        ParsedInstruction::new("r", tokens).unwrap()
    }

    #[test]
    fn turn_left_thirty_degrees() {
        let p = parse(&[
            ("turn", Upos::Verb, 0, "root"),
            ("left", Upos::Adv, 1, "advmod"),
            ("thirty", Upos::Num, 4, "nummod"),
            ("degrees", Upos::Noun, 1, "obl"),
        ]);
        let lex = Lexicons::default();
        let a = adverbial_profile([&p], &lex);
        assert_eq!(a.entries.len(), 1);
        assert_eq!(a.entries["left"], AdverbialEntry { class: AdverbialClass::Directional, count: 1 });
        let n = numeric_profile([&p], &lex);
        assert_eq!(n.counts, BTreeMap::from([("thirty".to_string(), 1)]));
    }

    #[test]
    fn move_forward_one_foot() {
        let p = parse(&[
            ("move", Upos::Verb, 0, "root"),
            ("forward", Upos::Adv, 1, "advmod"),
            ("one", Upos::Num, 4, "nummod"),
            ("foot", Upos::Noun, 1, "obl"),
        ]);
        let lex = Lexicons::default();
        assert_eq!(adverbial_profile([&p], &lex).entries["forward"].class, AdverbialClass::Directional);
        assert_eq!(numeric_profile([&p], &lex).counts["one"], 1);
    }

    #[test]
    fn oblique_case_marker() {
        let p = parse(&[
            ("put", Upos::Verb, 0, "root"),
            ("it", Upos::Pron, 1, "obj"),
            ("inside", Upos::Adp, 4, "case"),
            ("drawer", Upos::Noun, 1, "obl"),
            ("slowly", Upos::Adv, 1, "advmod"),
        ]);
        let a = adverbial_profile([&p], &Lexicons::default());
        assert_eq!(a.entries["inside"].class, AdverbialClass::Locative);
        assert_eq!(a.entries["slowly"].class, AdverbialClass::Manner);
        let totals = a.class_totals();
        assert_eq!(totals[&AdverbialClass::Locative], 1);
        assert_eq!(totals[&AdverbialClass::Temporal], 0);
    }

    #[test]
    fn nothing_to_count() {
        let p = parse(&[("pick", Upos::Verb, 0, "root"), ("apple", Upos::Noun, 1, "obj")]);
        let lex = Lexicons::default();
        assert!(adverbial_profile([&p], &lex).entries.is_empty());
        assert!(numeric_profile([&p], &lex).counts.is_empty());
    }
}
