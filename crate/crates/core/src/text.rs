//! Text normalization profiles.
//!
//! Every profile lowercases, deletes Unicode punctuation (general category
//! `P*`), collapses whitespace runs and trims. Apostrophes between two
//! alphanumeric characters survive so contractions such as "don't" stay
//! whole. Symbols (`$ + < = > ^ | ~` and the rest of `S*`) are not punctuation
//! and are kept.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::LazyLock;

use regex::Regex;

use crate::error::{Error, Result};

static PUNCT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\p{P}").unwrap());
static BRACKET_TAG: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\[[^\[\]]*\]|<[^<>]*>|\{[^{}]*\}").unwrap());

pub const DEFAULT_FILLERS: &[&str] = &["um", "uh", "er", "hmm"];

/// Normalization profile applied to every record at ingest time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cleaner {
    Default,
    /// Dialogue transcripts: bracketed role/annotation tags and filler words are removed.
    Scout { fillers: BTreeSet<String> },
}

impl Cleaner {
    pub fn scout() -> Self {
        Cleaner::Scout {
            fillers: DEFAULT_FILLERS.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Resolves a cleaner id. `fillers` replaces the default filler lexicon for `scout`.
    pub fn from_id(id: &str, fillers: Option<BTreeSet<String>>) -> Result<Self> {
        match id {
            "default" => Ok(Cleaner::Default),
            "scout" => Ok(match fillers {
                Some(fillers) => Cleaner::Scout {
                    fillers: fillers.iter().map(|f| normalize_default(f)).collect(),
                },
                None => Cleaner::scout(),
            }),
            other => Err(Error::UnknownCleaner(other.to_string())),
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            Cleaner::Default => "default",
            Cleaner::Scout { .. } => "scout",
        }
    }

    pub fn fillers(&self) -> Vec<String> {
        match self {
            Cleaner::Default => Vec::new(),
            Cleaner::Scout { fillers } => fillers.iter().cloned().collect(),
        }
    }
}

impl fmt::Display for Cleaner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

pub fn normalize_text(raw: &str, cleaner: &Cleaner) -> String {
    match cleaner {
        Cleaner::Default => normalize_default(raw),
        Cleaner::Scout { fillers } => {
            let untagged = BRACKET_TAG.replace_all(raw, " ");
            let cleaned = normalize_default(&untagged);
            cleaned
                .split(' ')
                .filter(|tok| !tok.is_empty() && !fillers.contains(*tok))
                .collect::<Vec<_>>()
                .join(" ")
        }
    }
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

fn normalize_default(raw: &str) -> String {
    let lower = raw.to_lowercase();
    let mut kept = String::with_capacity(lower.len());
    let mut last = 0;
    for m in PUNCT.find_iter(&lower) {
        kept.push_str(&lower[last..m.start()]);
        last = m.end();
        let c = m.as_str().chars().next().unwrap();
        if is_apostrophe(c) {
            let before = lower[..m.start()].chars().next_back();
            let after = lower[m.end()..].chars().next();
            if before.is_some_and(char::is_alphanumeric) && after.is_some_and(char::is_alphanumeric) {
                kept.push('\'');
            }
        }
    }
    kept.push_str(&lower[last..]);
    kept.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Rule-based sentence splitter: breaks after `.`, `?` or `!` runs. Pieces are
/// returned raw (un-normalized) and trimmed; empty pieces are dropped.
pub fn split_sentences(raw: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut chars = raw.chars().peekable();
    while let Some(c) = chars.next() {
        current.push(c);
        if matches!(c, '.' | '?' | '!') {
            while let Some(&next) = chars.peek() {
                if matches!(next, '.' | '?' | '!') {
                    current.push(next);
                    chars.next();
                } else {
                    break;
                }
            }
            let piece = current.trim();
            if !piece.is_empty() {
                out.push(piece.to_string());
            }
            current.clear();
        }
    }
    let piece = current.trim();
    if !piece.is_empty() {
        out.push(piece.to_string());
    }
    out
}
