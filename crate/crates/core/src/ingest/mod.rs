//! Strict readers and writers for every on-disk format the auditor exchanges.
//!
//! Readers never repair input: any grammar violation is an error that carries
//! a line number, character offset or record position.

mod conllu;
mod corpus;
mod embedding;
mod gold;
mod lexicon;
mod tree;

pub use conllu::{parse_conllu, read_conllu, write_conllu, ParsedInstruction, TokenAnnotation, Upos};
pub use corpus::{read_corpus, read_corpus_with, write_corpus, IngestSummary, ReadOptions};
pub use embedding::{
    read_embeddings, read_token_embeddings, write_embeddings, write_token_embeddings, EmbeddingMatrix,
    EmbeddingRows, TokenEmbeddingSet, MAX_DIMS,
};
pub use gold::{read_gold, GoldStructureLabels};
pub use lexicon::{parse_lexicon, read_lexicon};
pub use tree::{parse_ptb, read_trees, write_trees, ConstituencyTree, TreeNode};

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};

/// Iterates `\n`-terminated lines with 1-based line numbers.
pub(crate) fn jsonl_lines(path: &Path) -> Result<impl Iterator<Item = Result<(usize, String)>> + '_> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(BufReader::new(file)
        .lines()
        .enumerate()
        .map(move |(i, line)| line.map(|l| (i + 1, l)).map_err(|e| Error::io(path, e))))
}

pub(crate) fn parse_json_object(path: &Path, line_no: usize, line: &str) -> Result<serde_json::Map<String, serde_json::Value>> {
    if line.trim().is_empty() {
        return Err(Error::syntax(path, line_no, "empty line"));
    }
    match serde_json::from_str::<serde_json::Value>(line) {
        Ok(serde_json::Value::Object(map)) => Ok(map),
        Ok(_) => Err(Error::syntax(path, line_no, "expected a JSON object")),
        Err(e) => Err(Error::syntax(path, line_no, format!("malformed JSON: {e}"))),
    }
}

pub(crate) fn string_field<'a>(
    path: &Path,
    line_no: usize,
    obj: &'a serde_json::Map<String, serde_json::Value>,
    key: &str,
) -> Result<&'a str> {
    match obj.get(key) {
        Some(serde_json::Value::String(s)) => Ok(s),
        Some(_) => Err(Error::syntax(path, line_no, format!("field {key:?} must be a string"))),
        None => Err(Error::syntax(path, line_no, format!("missing field {key:?}"))),
    }
}
