use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use serde_json::Value;

use super::report::SCHEMA_VERSION;
use crate::error::{Error, Result};
use crate::ingest::Upos;
use crate::lexical::overlap_from_vocabularies;
use crate::stats::pearson;

/// Merged cross-dataset tables.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub markdown: String,
    pub table_csv: String,
    /// `(file name, csv)` per UPOS category with at least two vocabularies.
    pub overlaps: Vec<(String, String)>,
    pub correlations_csv: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Better {
    Lower,
    Higher,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Cell {
    Missing,
    Int(u64),
    Percent(f64),
    Float(f64),
    MeanStd(f64, f64),
}

impl Cell {
    fn key(self) -> Option<f64> {
        match self {
            Cell::Missing => None,
            Cell::Int(v) => Some(v as f64),
            Cell::Percent(v) | Cell::Float(v) | Cell::MeanStd(v, _) => Some(v),
        }
    }

    fn markdown(self) -> String {
        match self {
            Cell::Missing => "n/a".to_string(),
            Cell::Int(v) => v.to_string(),
            Cell::Percent(v) => format!("{:.2}", v * 100.0),
            Cell::Float(v) => format!("{v:.3}"),
            Cell::MeanStd(m, s) => format!("{m:.3} ± {s:.3}"),
        }
    }

    fn csv(self) -> Vec<String> {
        match self {
            Cell::Missing => vec![String::new()],
            Cell::Int(v) => vec![v.to_string()],
            Cell::Percent(v) | Cell::Float(v) => vec![v.to_string()],
            Cell::MeanStd(m, s) => vec![m.to_string(), s.to_string()],
        }
    }
}

struct Column {
    header: String,
    csv_keys: Vec<String>,
    better: Option<Better>,
    cells: Vec<Cell>,
}

fn computed<'a>(v: &'a Value, ptr: &str) -> Option<&'a Value> {
    let m = v.pointer(ptr)?;
    (m.get("status")?.as_str()? == "computed").then(|| &m["value"])
}

fn int_at(v: &Value, ptr: &str) -> Cell {
    v.pointer(ptr).and_then(Value::as_u64).map_or(Cell::Missing, Cell::Int)
}

fn mean_std(v: &Value, ptr: &str) -> Cell {
    computed(v, ptr)
        .and_then(|m| Some(Cell::MeanStd(m.get("mean")?.as_f64()?, m.get("std")?.as_f64()?)))
        .unwrap_or(Cell::Missing)
}

fn arrow(b: Option<Better>) -> &'static str {
    match b {
        Some(Better::Lower) => " ↓",
        Some(Better::Higher) => " ↑",
        None => "",
    }
}

fn mean_length(v: &Value) -> Option<f64> {
    let h = v.pointer("/a1/stats/length_histogram")?.as_object()?;
    let (mut words, mut n) = (0.0, 0.0);
    for (k, c) in h {
        let c = c.as_f64()?;
        words += k.parse::<f64>().ok()? * c;
        n += c;
    }
    (n > 0.0).then(|| words / n)
}

/// Merges at least two parsed `report.json` values. `labels` name the inputs in errors.
pub fn compare_reports(reports: &[(String, Value)]) -> Result<Comparison> {
    if reports.len() < 2 {
        return Err(Error::invalid(format!("need at least two reports, got {}", reports.len())));
    }
    let versions: Vec<(String, Option<u64>)> = reports
        .iter()
        .map(|(l, v)| (l.clone(), v.get("schema_version").and_then(Value::as_u64)))
        .collect();
    if versions.iter().any(|(_, v)| *v != Some(SCHEMA_VERSION)) {
        let parts: Vec<String> = versions
            .iter()
            .map(|(l, v)| format!("{l} has {}", v.map_or("none".to_string(), |v| v.to_string())))
            .collect();
        return Err(Error::invalid(format!(
            "schema version mismatch: {} (this build reads version {SCHEMA_VERSION})",
            parts.join(", ")
        )));
    }
    let mut names = Vec::new();
    let mut seen = HashSet::new();
    for (label, v) in reports {
        let id = v
            .get("dataset_id")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::invalid(format!("{label}: report has no dataset_id")))?;
        if !seen.insert(id.to_string()) {
            return Err(Error::invalid(format!("duplicate dataset_id {id} ({label})")));
        }
        names.push(id.to_string());
    }
    let values: Vec<&Value> = reports.iter().map(|(_, v)| v).collect();

    let mut columns = Vec::new();
    let mut col = |header: &str, keys: &[&str], better: Option<Better>, f: &dyn Fn(&Value) -> Cell| {
        columns.push(Column {
            header: header.to_string(),
            csv_keys: keys.iter().map(|k| k.to_string()).collect(),
            better,
            cells: values.iter().map(|v| f(v)).collect(),
        });
    };
    col("# Sent", &["n_sentences"], None, &|v| int_at(v, "/a1/stats/n_sentences"));
    col("% Uniq", &["pct_unique"], None, &|v| {
        v.pointer("/a1/stats/pct_unique").and_then(Value::as_f64).map_or(Cell::Missing, Cell::Percent)
    });
    col("# Uniq", &["n_unique"], None, &|v| int_at(v, "/a1/stats/n_unique"));
    col("# Words", &["n_unigrams"], None, &|v| int_at(v, "/a1/stats/n_unigrams"));
    col("CR", &["compression_ratio"], Some(Better::Lower), &|v| {
        computed(v, "/a1/compression_ratio").and_then(Value::as_f64).map_or(Cell::Missing, Cell::Float)
    });
    col("ROUGE-L", &["rouge_l_mean", "rouge_l_std"], Some(Better::Lower), &|v| mean_std(v, "/a1/rouge_l"));
    col("BLEU-4", &["bleu4_mean", "bleu4_std"], Some(Better::Lower), &|v| mean_std(v, "/a1/bleu4"));
    col("Jaccard", &["jaccard_mean", "jaccard_std"], Some(Better::Lower), &|v| mean_std(v, "/a1/jaccard"));
    col("Levenshtein", &["levenshtein_mean", "levenshtein_std"], Some(Better::Higher), &|v| {
        mean_std(v, "/a1/levenshtein")
    });
    col("BERTScore", &["bertscore_mean", "bertscore_std"], Some(Better::Lower), &|v| mean_std(v, "/a2/bertscore"));
    let encoders: BTreeSet<String> = values
        .iter()
        .filter_map(|v| computed(v, "/a2/pca").and_then(Value::as_object))
        .flat_map(|m| m.keys().cloned())
        .collect();
    for enc in &encoders {
        let ptr = format!("/{}/components", enc.replace('~', "~0").replace('/', "~1"));
        col(&format!("PCA {enc}"), &[&format!("pca_{enc}")], Some(Better::Higher), &|v| {
            computed(v, "/a2/pca")
                .and_then(|m| m.pointer(&ptr))
                .and_then(Value::as_u64)
                .map_or(Cell::Missing, Cell::Int)
        });
    }
    col("Tree Kernel", &["tree_kernel_mean", "tree_kernel_std"], Some(Better::Lower), &|v| {
        mean_std(v, "/a3/tree_kernel")
    });

    // best value per column
    let best: Vec<Option<f64>> = columns
        .iter()
        .map(|c| {
            let keys = c.cells.iter().filter_map(|x| x.key());
            match c.better? {
                Better::Lower => keys.reduce(f64::min),
                Better::Higher => keys.reduce(f64::max),
            }
        })
        .collect();

    let mut md = String::new();
    md.push_str("# Dataset comparison\n\n");
    md.push_str("Arrows give the more diverse direction; the most diverse value in each column is bold.\n\n");
    md.push_str("| Dataset |");
    for c in &columns {
        let _ = write!(md, " {}{} |", c.header, arrow(c.better));
    }
    md.push_str("\n|---|");
    for _ in &columns {
        md.push_str("---|");
    }
    md.push('\n');
    for (i, name) in names.iter().enumerate() {
        let _ = write!(md, "| {name} |");
        for (c, b) in columns.iter().zip(&best) {
            let cell = c.cells[i];
            let text = cell.markdown();
            if cell.key().is_some() && cell.key() == *b {
                let _ = write!(md, " **{text}** |");
            } else {
                let _ = write!(md, " {text} |");
            }
        }
        md.push('\n');
    }

    let table_csv = {
        let mut header = vec!["dataset".to_string()];
        for c in &columns {
            header.extend(c.csv_keys.iter().cloned());
        }
        let mut rows = vec![header];
        for (i, name) in names.iter().enumerate() {
            let mut row = vec![name.clone()];
            for c in &columns {
                let mut vals = c.cells[i].csv();
                // a skipped mean/std column still occupies both fields
                while vals.len() < c.csv_keys.len() {
                    vals.push(String::new());
                }
                row.extend(vals);
            }
            rows.push(row);
        }
        write_csv(&rows)?
    };

    // overlap matrices from per-report POS vocabularies
    let mut overlaps = Vec::new();
    for cat in [Upos::Noun, Upos::Verb, Upos::Adv] {
        let vocabularies: Vec<(String, BTreeSet<String>)> = names
            .iter()
            .zip(&values)
            .filter_map(|(n, v)| {
                let words = computed(v, "/a1/pos_vocabulary")?.get(cat.as_str())?.as_array()?;
                Some((n.clone(), words.iter().filter_map(Value::as_str).map(str::to_string).collect()))
            })
            .collect();
        if vocabularies.len() < 2 {
            let _ = writeln!(md, "\n{} overlap: needs parses for at least two datasets.", cat.as_str());
            continue;
        }
        let m = overlap_from_vocabularies(cat, &vocabularies);
        let _ = writeln!(md, "\n## {} lemma overlap\n", cat.as_str());
        md.push_str("| |");
        for d in &m.datasets {
            let _ = write!(md, " {d} |");
        }
        md.push_str("\n|---|");
        for _ in &m.datasets {
            md.push_str("---|");
        }
        md.push('\n');
        let mut rows = vec![std::iter::once("dataset".to_string()).chain(m.datasets.iter().cloned()).collect::<Vec<_>>()];
        for (d, row) in m.datasets.iter().zip(&m.counts) {
            let _ = write!(md, "| {d} |");
            for c in row {
                let _ = write!(md, " {c} |");
            }
            md.push('\n');
            rows.push(std::iter::once(d.clone()).chain(row.iter().map(|c| c.to_string())).collect());
        }
        let shared: Vec<&str> = m.shared_by_all.iter().map(String::as_str).collect();
        let _ = writeln!(md, "\nShared by all {}: {}", shared.len(), shared.join(", "));
        overlaps.push((format!("overlap_{}.csv", cat.as_str().to_lowercase()), write_csv(&rows)?));
    }

    // PCA components against corpus statistics
    type StatFn = fn(&Value) -> Option<f64>;
    let stats: [(&str, StatFn); 6] = [
        ("n_sentences", |v| v.pointer("/a1/stats/n_sentences")?.as_f64()),
        ("n_unique", |v| v.pointer("/a1/stats/n_unique")?.as_f64()),
        ("pct_unique", |v| v.pointer("/a1/stats/pct_unique")?.as_f64()),
        ("n_unigrams", |v| v.pointer("/a1/stats/n_unigrams")?.as_f64()),
        ("compression_ratio", |v| computed(v, "/a1/compression_ratio")?.as_f64()),
        ("mean_length", mean_length),
    ];
    let mut corr_rows = vec![vec!["encoder".to_string(), "statistic".to_string(), "n".to_string(), "pearson_r".to_string()]];
    let mut corr_md = String::new();
    for enc in &encoders {
        for (name, f) in &stats {
            let (mut xs, mut ys) = (Vec::new(), Vec::new());
            for v in &values {
                let k = computed(v, "/a2/pca").and_then(|m| m.get(enc)).and_then(|r| r.get("components")?.as_f64());
                if let (Some(k), Some(s)) = (k, f(v)) {
                    xs.push(k);
                    ys.push(s);
                }
            }
            let r = pearson(&xs, &ys);
            corr_rows.push(vec![
                enc.clone(),
                name.to_string(),
                xs.len().to_string(),
                r.map(|r| r.to_string()).unwrap_or_default(),
            ]);
            let _ = writeln!(
                corr_md,
                "| {enc} | {name} | {} | {} |",
                xs.len(),
                r.map_or("n/a".to_string(), |r| format!("{r:.3}"))
            );
        }
    }
    if !corr_md.is_empty() {
        md.push_str("\n## PCA components vs corpus statistics (Pearson)\n\n| Encoder | Statistic | n | r |\n|---|---|---|---|\n");
        md.push_str(&corr_md);
    }

    Ok(Comparison {
        markdown: md,
        table_csv,
        overlaps,
        correlations_csv: write_csv(&corr_rows)?,
    })
}

fn write_csv(rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for r in rows {
        w.write_record(r).map_err(|e| Error::invalid(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::invalid(format!("csv: {e}")))
}
