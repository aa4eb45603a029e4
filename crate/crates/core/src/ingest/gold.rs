use std::collections::BTreeMap;
use std::path::Path;

use super::{jsonl_lines, parse_json_object, string_field};
use crate::error::{Error, Result};
use crate::model::Corpus;
use crate::structural::StructureLabel;

/// Manually reviewed structure labels for a subset of the corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldStructureLabels {
    pub labels: BTreeMap<String, StructureLabel>,
    pub annotator_id: String,
}

/// Reads `{"id", "negation", "conditional", "multi_step", "cycle", "annotator"?}` lines.
pub fn read_gold(path: &Path, corpus: &Corpus) -> Result<GoldStructureLabels> {
    let ids = corpus.id_set();
    let mut labels = BTreeMap::new();
    let mut annotator: Option<String> = None;
    for line in jsonl_lines(path)? {
        let (line_no, line) = line?;
        let obj = parse_json_object(path, line_no, &line)?;
        let id = string_field(path, line_no, &obj, "id")?;
        if !ids.contains(id) {
            return Err(Error::syntax(path, line_no, format!("gold id {id} not in corpus")));
        }
        let flag = |key: &str| -> Result<bool> {
            obj.get(key)
                .and_then(serde_json::Value::as_bool)
                .ok_or_else(|| Error::syntax(path, line_no, format!("field {key:?} must be a boolean")))
        };
        let label = StructureLabel {
            negation: flag("negation")?,
            conditional: flag("conditional")?,
            multi_step: flag("multi_step")?,
            cycle: flag("cycle")?,
        };
        if obj.contains_key("annotator") {
            let a = string_field(path, line_no, &obj, "annotator")?;
            match &annotator {
                Some(prev) if prev != a => {
                    return Err(Error::syntax(path, line_no, format!("mixed annotators {prev:?} and {a:?}")))
                }
                _ => annotator = Some(a.to_string()),
            }
        }
        if labels.insert(id.to_string(), label).is_some() {
            return Err(Error::DuplicateId {
                id: id.to_string(),
                line: line_no,
            });
        }
    }
    Ok(GoldStructureLabels {
        labels,
        annotator_id: annotator.unwrap_or_else(|| "unknown".to_string()),
    })
}
