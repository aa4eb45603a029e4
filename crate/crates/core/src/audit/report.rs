use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use super::sampling::MetricValue;
use crate::error::{Error, Result};
use crate::model::CorpusStats;
use crate::semantic::{AdverbialClass, AdverbialProfile, NumericProfile, PcaResult, VerbObjectMatrix};
use crate::structural::{PatternSummary, StructureReport};

pub const SCHEMA_VERSION: u64 = 1;

/// A metric value, or the reason it could not be computed.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Metric<T> {
    Computed { value: T },
    Skipped { reason: String },
}

impl<T> Metric<T> {
    pub fn skipped(reason: impl Into<String>) -> Self {
        Metric::Skipped { reason: reason.into() }
    }

    pub fn missing(kind: &str) -> Self {
        Metric::Skipped {
            reason: format!("missing {kind}"),
        }
    }

    pub fn from_result(r: Result<T>) -> Self {
        match r {
            Ok(value) => Metric::Computed { value },
            Err(e) => Metric::skipped(e.to_string()),
        }
    }

    pub fn value(&self) -> Option<&T> {
        match self {
            Metric::Computed { value } => Some(value),
            Metric::Skipped { .. } => None,
        }
    }

    pub fn is_computed(&self) -> bool {
        matches!(self, Metric::Computed { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelEcho {
    pub variant: String,
    pub lambda: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub cleaner: String,
    pub fillers: Vec<String>,
    pub sample_size: usize,
    pub trials: usize,
    pub seed: u64,
    pub generator: String,
    pub pairwise_on_unique: bool,
    pub pca_on_all: bool,
    pub gzip_level: u32,
    pub tree_kernel: KernelEcho,
    pub lexicons: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnotationCoverage {
    pub covered: usize,
    pub records: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectionA1 {
    pub stats: CorpusStats,
    pub compression_ratio: Metric<f64>,
    pub rouge_l: Metric<MetricValue>,
    pub bleu4: Metric<MetricValue>,
    pub jaccard: Metric<MetricValue>,
    pub levenshtein: Metric<MetricValue>,
    /// UPOS category -> sorted lemmas, used for cross-dataset overlap.
    pub pos_vocabulary: Metric<BTreeMap<String, Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectionA2 {
    pub pca: Metric<BTreeMap<String, PcaResult>>,
    pub bertscore: Metric<MetricValue>,
    pub verb_object: Metric<VerbObjectMatrix>,
    pub unique_verbs_per_object: Metric<BTreeMap<String, usize>>,
    pub verbs_per_object_histogram: Metric<BTreeMap<usize, usize>>,
    pub adverbial_profile: Metric<AdverbialProfile>,
    pub adverbial_classes: Metric<BTreeMap<AdverbialClass, u64>>,
    pub numeric_profile: Metric<NumericProfile>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectionA3 {
    pub pos_patterns: Metric<PatternSummary>,
    /// Mean normalized kernel x 100.
    pub tree_kernel: Metric<MetricValue>,
    pub structures: Metric<StructureReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub schema_version: u64,
    pub tool: String,
    pub dataset_id: String,
    pub source_path: String,
    pub config: ConfigEcho,
    pub annotations: BTreeMap<String, AnnotationCoverage>,
    pub notes: Vec<String>,
    pub a1: SectionA1,
    pub a2: SectionA2,
    pub a3: SectionA3,
}

impl AuditReport {
    pub fn to_canonical_json(&self) -> Result<String> {
        to_canonical_json(self)
    }
}

/// JSON with sorted keys, two-space indentation and every float written with
/// 17 significant digits, so equal values always serialize to equal bytes.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::invalid(format!("report serialization: {e}")))?;
    let mut out = String::new();
    write_value(&v, 0, &mut out);
    out.push('\n');
    Ok(out)
}

fn write_value(v: &Value, depth: usize, out: &mut String) {
    let indent = |d: usize, out: &mut String| {
        for _ in 0..d {
            out.push_str("  ");
        }
    };
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                write!(out, "{u}").unwrap();
            } else if let Some(i) = n.as_i64() {
                write!(out, "{i}").unwrap();
            } else {
                let f = n.as_f64().expect("json number");
                write!(out, "{f:.16e}").unwrap();
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                indent(depth + 1, out);
                write_value(item, depth + 1, out);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            indent(depth, out);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                indent(depth + 1, out);
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_value(&map[*k], depth + 1, out);
                if i + 1 < keys.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            indent(depth, out);
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_floats_and_order() {
        let v = serde_json::json!({"b": 0.1, "a": [1, -2, 1.0], "c": {"z": null, "y": "q\""}});
        let s = to_canonical_json(&v).unwrap();
        let expect = "{\n  \"a\": [\n    1,\n    -2,\n    1.0000000000000000e0\n  ],\n  \"b\": 1.0000000000000001e-1,\n  \"c\": {\n    \"y\": \"q\\\"\",\n    \"z\": null\n  }\n}\n";
        assert_eq!(s, expect);
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["b"].as_f64(), Some(0.1));
    }

    #[test]
    fn metric_tagging() {
        let m: Metric<f64> = Metric::missing("conllu");
        assert_eq!(serde_json::to_value(&m).unwrap(), serde_json::json!({"status": "skipped", "reason": "missing conllu"}));
        let m = Metric::Computed { value: 2.0 };
        assert_eq!(serde_json::to_value(&m).unwrap(), serde_json::json!({"status": "computed", "value": 2.0}));
    }
}
