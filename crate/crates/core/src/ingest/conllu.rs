use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Corpus;

/// Universal Dependencies part-of-speech tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Upos {
    Adj,
    Adp,
    Adv,
    Aux,
    Cconj,
    Det,
    Intj,
    Noun,
    Num,
    Part,
    Pron,
    Propn,
    Punct,
    Sconj,
    Sym,
    Verb,
    X,
}

impl Upos {
    pub const ALL: [Upos; 17] = [
        Upos::Adj,
        Upos::Adp,
        Upos::Adv,
        Upos::Aux,
        Upos::Cconj,
        Upos::Det,
        Upos::Intj,
        Upos::Noun,
        Upos::Num,
        Upos::Part,
        Upos::Pron,
        Upos::Propn,
        Upos::Punct,
        Upos::Sconj,
        Upos::Sym,
        Upos::Verb,
        Upos::X,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Upos::Adj => "ADJ",
            Upos::Adp => "ADP",
            Upos::Adv => "ADV",
            Upos::Aux => "AUX",
            Upos::Cconj => "CCONJ",
            Upos::Det => "DET",
            Upos::Intj => "INTJ",
            Upos::Noun => "NOUN",
            Upos::Num => "NUM",
            Upos::Part => "PART",
            Upos::Pron => "PRON",
            Upos::Propn => "PROPN",
            Upos::Punct => "PUNCT",
            Upos::Sconj => "SCONJ",
            Upos::Sym => "SYM",
            Upos::Verb => "VERB",
            Upos::X => "X",
        }
    }
}

impl fmt::Display for Upos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Upos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Upos::ALL
            .iter()
            .copied()
            .find(|u| u.as_str() == s)
            .ok_or_else(|| format!("unknown UPOS tag {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenAnnotation {
    /// 1-based position in the sentence.
    pub index: usize,
    pub surface: String,
    pub lemma: String,
    pub upos: Upos,
    /// Index of the syntactic head; 0 marks the root.
    pub head: usize,
    pub deprel: String,
}

impl TokenAnnotation {
    /// Universal relation without its subtype (`compound:prt` -> `compound`).
    pub fn base_deprel(&self) -> &str {
        self.deprel.split(':').next().unwrap_or("")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedInstruction {
    pub record_id: String,
    pub tokens: Vec<TokenAnnotation>,
}

impl ParsedInstruction {
    /// Checks the dependency invariants: non-empty, sequential indices, heads in range,
    /// no self-loops and at least one root.
    pub fn new(record_id: impl Into<String>, tokens: Vec<TokenAnnotation>) -> Result<Self> {
        let record_id = record_id.into();
        validate_tokens(&tokens).map_err(|m| Error::invalid(format!("parse {record_id}: {m}")))?;
        Ok(ParsedInstruction { record_id, tokens })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn upos_sequence(&self) -> Vec<Upos> {
        self.tokens.iter().map(|t| t.upos).collect()
    }

    /// Token whose 1-based index is `index`.
    pub fn token(&self, index: usize) -> Option<&TokenAnnotation> {
        index.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    pub fn head_of(&self, tok: &TokenAnnotation) -> Option<&TokenAnnotation> {
        if tok.head == 0 {
            None
        } else {
            self.token(tok.head)
        }
    }

    pub fn children_of(&self, index: usize) -> impl Iterator<Item = &TokenAnnotation> {
        self.tokens.iter().filter(move |t| t.head == index)
    }
}

fn validate_tokens(tokens: &[TokenAnnotation]) -> std::result::Result<(), String> {
    if tokens.is_empty() {
        return Err("sentence has no tokens".into());
    }
    let n = tokens.len();
    for (i, t) in tokens.iter().enumerate() {
        if t.index != i + 1 {
            return Err(format!("token index {} out of sequence (expected {})", t.index, i + 1));
        }
        if t.head > n {
            return Err(format!("head out of range: token {} has head {} in a {n}-token sentence", t.index, t.head));
        }
        if t.head == t.index {
            return Err(format!("token {} is its own head", t.index));
        }
    }
    if !tokens.iter().any(|t| t.head == 0) {
        return Err("sentence has no root".into());
    }
    Ok(())
}

/// Reads CoNLL-U and checks every `# sent_id` against the corpus.
pub fn read_conllu(path: &Path, corpus: &Corpus) -> Result<BTreeMap<String, ParsedInstruction>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let ids = corpus.id_set();
    parse_conllu(path, &text, Some(&ids))
}

/// Parses CoNLL-U text. `path` is only used in error messages. When `known_ids`
/// is given, every block's `sent_id` must be in it.
pub fn parse_conllu(
    path: &Path,
    text: &str,
    known_ids: Option<&HashSet<&str>>,
) -> Result<BTreeMap<String, ParsedInstruction>> {
    let mut out = BTreeMap::new();
    let mut block = Block::default();
    let mut line_no = 0;

    for (i, raw) in text.split('\n').enumerate() {
        line_no = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            if !block.is_empty() {
                block.finish(path, line_no, known_ids, &mut out)?;
            }
            continue;
        }
        if block.is_empty() {
            block.start_line = line_no;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(id) = parse_sent_id(comment) {
                if block.sent_id.is_some() {
                    return Err(Error::syntax(path, line_no, "second sent_id in one sentence block"));
                }
                if id.is_empty() {
                    return Err(Error::syntax(path, line_no, "empty sent_id"));
                }
                block.sent_id = Some(id.to_string());
            }
            block.comments += 1;
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(Error::syntax(path, line_no, format!("expected 10 tab-separated columns, found {}", cols.len())));
        }
        let id_col = cols[0];
        if id_col.contains('-') || id_col.contains('.') {
            // multiword token ranges and empty nodes carry no tree
            continue;
        }
        let index: usize = id_col
            .parse()
            .map_err(|_| Error::syntax(path, line_no, format!("bad token id {id_col:?}")))?;
        if index != block.tokens.len() + 1 {
            return Err(Error::syntax(path, line_no, format!("token id {index} out of sequence")));
        }
        let upos = Upos::from_str(cols[3]).map_err(|m| Error::syntax(path, line_no, m))?;
        let head: usize = cols[6]
            .parse()
            .map_err(|_| Error::syntax(path, line_no, format!("bad head {:?}", cols[6])))?;
        if head == index {
            return Err(Error::syntax(path, line_no, "token is its own head"));
        }
        let deprel = cols[7];
        if deprel.is_empty() || deprel == "_" {
            return Err(Error::syntax(path, line_no, "missing dependency label"));
        }
        let surface = cols[1].to_string();
        let lemma = if cols[2] == "_" { surface.to_lowercase() } else { cols[2].to_lowercase() };
        block.tokens.push((
            line_no,
            TokenAnnotation {
                index,
                surface,
                lemma,
                upos,
                head,
                deprel: deprel.to_string(),
            },
        ));
    }
    if !block.is_empty() {
        block.finish(path, line_no, known_ids, &mut out)?;
    }
    Ok(out)
}

fn parse_sent_id(comment: &str) -> Option<&str> {
    let rest = comment.trim_start().strip_prefix("sent_id")?;
    let rest = rest.trim_start().strip_prefix('=')?;
    Some(rest.trim())
}

#[derive(Default)]
struct Block {
    start_line: usize,
    sent_id: Option<String>,
    comments: usize,
    tokens: Vec<(usize, TokenAnnotation)>,
}

impl Block {
    fn is_empty(&self) -> bool {
        self.comments == 0 && self.tokens.is_empty()
    }

    fn finish(
        &mut self,
        path: &Path,
        line_no: usize,
        known_ids: Option<&HashSet<&str>>,
        out: &mut BTreeMap<String, ParsedInstruction>,
    ) -> Result<()> {
        let block = std::mem::take(self);
        let Some(id) = block.sent_id else {
            return Err(Error::syntax(path, block.start_line, "missing sent_id"));
        };
        if block.tokens.is_empty() {
            return Err(Error::syntax(path, line_no, format!("sentence {id} has no tokens")));
        }
        let n = block.tokens.len();
        for (tok_line, tok) in &block.tokens {
            if tok.head > n {
                return Err(Error::syntax(
                    path,
                    *tok_line,
                    format!("head out of range ({} in a {n}-token sentence)", tok.head),
                ));
            }
        }
        if !block.tokens.iter().any(|(_, t)| t.head == 0) {
            return Err(Error::syntax(path, block.start_line, format!("sentence {id} has no root")));
        }
        if let Some(known) = known_ids {
            if !known.contains(id.as_str()) {
                return Err(Error::syntax(path, block.start_line, format!("unknown sent_id {id}")));
            }
        }
        let parsed = ParsedInstruction {
            record_id: id.clone(),
            tokens: block.tokens.into_iter().map(|(_, t)| t).collect(),
        };
        if out.insert(id.clone(), parsed).is_some() {
            return Err(Error::syntax(path, block.start_line, format!("duplicate sent_id {id}")));
        }
        Ok(())
    }
}

pub fn write_conllu<'a, W, I>(parses: I, mut out: W) -> std::io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a ParsedInstruction>,
{
    for p in parses {
        writeln!(out, "# sent_id = {}", p.record_id)?;
        for t in &p.tokens {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t_\t_\t{}\t{}\t_\t_",
                t.index, t.surface, t.lemma, t.upos, t.head, t.deprel
            )?;
        }
        writeln!(out)?;
    }
    Ok(())
}
