//! Word lists used by the semantic profiles and the structure detectors.
//!
//! Defaults are compiled in from `data/lexicons`; any list can be replaced
//! from a file with the same one-lemma-per-line format.

use std::collections::BTreeSet;
use std::path::Path;

use serde::Serialize;

use crate::ingest::{parse_lexicon, read_lexicon};
use crate::error::Result;

pub const DIRECTIONAL: &str = include_str!("../data/lexicons/directional.txt");
pub const LOCATIVE: &str = include_str!("../data/lexicons/locative.txt");
pub const MANNER: &str = include_str!("../data/lexicons/manner.txt");
pub const TEMPORAL: &str = include_str!("../data/lexicons/temporal.txt");
pub const NUMERALS: &str = include_str!("../data/lexicons/numerals.txt");
pub const NEGATION: &str = include_str!("../data/lexicons/negation.txt");
pub const CONDITIONAL: &str = include_str!("../data/lexicons/conditional.txt");
pub const CYCLE: &str = include_str!("../data/lexicons/cycle.txt");
pub const SEQUENCE: &str = include_str!("../data/lexicons/sequence.txt");
pub const FILLERS: &str = include_str!("../data/lexicons/fillers.txt");

/// Names accepted by [`Lexicons::replace`] and by the `[lexicons]` config table.
pub const NAMES: &[&str] = &[
    "directional",
    "locative",
    "manner",
    "temporal",
    "numerals",
    "negation",
    "conditional",
    "cycle",
    "sequence",
    "fillers",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lexicons {
    pub directional: BTreeSet<String>,
    pub locative: BTreeSet<String>,
    pub manner: BTreeSet<String>,
    pub temporal: BTreeSet<String>,
    pub numerals: BTreeSet<String>,
    pub negation: BTreeSet<String>,
    pub conditional: BTreeSet<String>,
    pub cycle: BTreeSet<String>,
    pub sequence: BTreeSet<String>,
    pub fillers: BTreeSet<String>,
}

impl Default for Lexicons {
    fn default() -> Self {
        Lexicons {
            directional: parse_lexicon(DIRECTIONAL),
            locative: parse_lexicon(LOCATIVE),
            manner: parse_lexicon(MANNER),
            temporal: parse_lexicon(TEMPORAL),
            numerals: parse_lexicon(NUMERALS),
            negation: parse_lexicon(NEGATION),
            conditional: parse_lexicon(CONDITIONAL),
            cycle: parse_lexicon(CYCLE),
            sequence: parse_lexicon(SEQUENCE),
            fillers: parse_lexicon(FILLERS),
        }
    }
}

impl Lexicons {
    fn slot(&mut self, name: &str) -> Option<&mut BTreeSet<String>> {
        Some(match name {
            "directional" => &mut self.directional,
            "locative" => &mut self.locative,
            "manner" => &mut self.manner,
            "temporal" => &mut self.temporal,
            "numerals" => &mut self.numerals,
            "negation" => &mut self.negation,
            "conditional" => &mut self.conditional,
            "cycle" => &mut self.cycle,
            "sequence" => &mut self.sequence,
            "fillers" => &mut self.fillers,
            _ => return None,
        })
    }

    /// Replaces one named list with the contents of `path`.
    pub fn replace(&mut self, name: &str, path: &Path) -> Result<()> {
        let words = read_lexicon(path)?;
        let slot = self
            .slot(name)
            .ok_or_else(|| crate::Error::invalid(format!("unknown lexicon {name:?}")))?;
        *slot = words;
        Ok(())
    }
}
