use std::fmt::Write as _;

use super::engine::AuditRun;
use super::report::{AuditReport, Metric};
use super::sampling::MetricValue;
use crate::error::{Error, Result};

fn csv_string<F>(header: &[&str], fill: F) -> Result<String>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let run = |w: &mut csv::Writer<Vec<u8>>| -> csv::Result<()> {
        w.write_record(header)?;
        fill(w)?;
        w.flush()?;
        Ok(())
    };
    run(&mut w).map_err(|e| Error::invalid(format!("csv: {e}")))?;
    let bytes = w.into_inner().map_err(|e| Error::invalid(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::invalid(format!("csv: {e}")))
}

/// Plot-data tables as `(file name, contents)`. Every file is always
/// produced; tables for skipped metrics hold only the header row.
pub fn plot_csvs(run: &AuditRun) -> Result<Vec<(String, String)>> {
    let r = &run.report;
    let mut out = Vec::new();

    out.push((
        "length_histogram.csv".to_string(),
        csv_string(&["words", "sentences"], |w| {
            for (k, v) in &r.a1.stats.length_histogram {
                w.write_record([k.to_string(), v.to_string()])?;
            }
            Ok(())
        })?,
    ));
    out.push((
        "verb_object_heatmap.csv".to_string(),
        csv_string(&["verb", "object", "count"], |w| {
            if let Some(m) = r.a2.verb_object.value() {
                for (v, o, c) in m.cells() {
                    w.write_record([v, o, &c.to_string()])?;
                }
            }
            Ok(())
        })?,
    ));
    out.push((
        "unique_verbs_histogram.csv".to_string(),
        csv_string(&["distinct_verbs", "objects"], |w| {
            if let Some(h) = r.a2.verbs_per_object_histogram.value() {
                for (k, v) in h {
                    w.write_record([k.to_string(), v.to_string()])?;
                }
            }
            Ok(())
        })?,
    ));
    out.push((
        "adverbial_profile.csv".to_string(),
        csv_string(&["modifier", "class", "count"], |w| {
            if let Some(p) = r.a2.adverbial_profile.value() {
                for (k, e) in &p.entries {
                    w.write_record([k.as_str(), e.class.as_str(), &e.count.to_string()])?;
                }
            }
            Ok(())
        })?,
    ));
    out.push((
        "numeric_profile.csv".to_string(),
        csv_string(&["numeral", "count"], |w| {
            if let Some(p) = r.a2.numeric_profile.value() {
                for (k, c) in &p.counts {
                    w.write_record([k.clone(), c.to_string()])?;
                }
            }
            Ok(())
        })?,
    ));
    out.push((
        "structure_bars.csv".to_string(),
        csv_string(&["flag", "count", "fraction", "se"], |w| {
            if let Some(s) = r.a3.structures.value() {
                for (flag, f) in &s.flags {
                    let se = f.se.map(|v| v.to_string()).unwrap_or_default();
                    w.write_record([flag.clone(), f.count.to_string(), f.fraction.to_string(), se])?;
                }
            }
            Ok(())
        })?,
    ));
    out.push((
        "pattern_bars.csv".to_string(),
        csv_string(&["rank", "pattern", "count", "frequency", "exemplar"], |w| {
            for (i, p) in run.patterns.iter().enumerate() {
                w.write_record([
                    (i + 1).to_string(),
                    p.pattern.to_string(),
                    p.count.to_string(),
                    p.frequency.to_string(),
                    p.exemplar.clone(),
                ])?;
            }
            Ok(())
        })?,
    ));
    Ok(out)
}

pub(crate) fn fmt_value(m: &Metric<MetricValue>) -> String {
    match m {
        Metric::Computed { value } => format!("{:.3} ± {:.3}", value.mean, value.std),
        Metric::Skipped { reason } => format!("n/a ({reason})"),
    }
}

fn skipped<T>(m: &Metric<T>) -> Option<&str> {
    match m {
        Metric::Skipped { reason } => Some(reason),
        Metric::Computed { .. } => None,
    }
}

/// Human-readable summary of one report.
pub fn render_markdown(r: &AuditReport) -> String {
    let mut s = String::new();
    let c = &r.config;
    let _ = writeln!(s, "# Audit: {}\n", r.dataset_id);
    let _ = writeln!(
        s,
        "Source `{}`, cleaner `{}`, seed {}, {} samples x {} trials, pairwise_on_unique = {}, pca_on_all = {}.\n",
        r.source_path, c.cleaner, c.seed, c.sample_size, c.trials, c.pairwise_on_unique, c.pca_on_all
    );

    let st = &r.a1.stats;
    s.push_str("## A.1 Duplication and lexical\n\n| Metric | Value |\n|---|---|\n");
    let _ = writeln!(s, "| # Sent | {} |", st.n_sentences);
    let _ = writeln!(s, "| % Uniq | {:.2} |", st.pct_unique * 100.0);
    let _ = writeln!(s, "| # Uniq | {} |", st.n_unique);
    let _ = writeln!(s, "| # Words | {} |", st.n_unigrams);
    let cr = match &r.a1.compression_ratio {
        Metric::Computed { value } => format!("{value:.3}"),
        Metric::Skipped { reason } => format!("n/a ({reason})"),
    };
    let _ = writeln!(s, "| CR | {cr} |");
    let _ = writeln!(s, "| ROUGE-L | {} |", fmt_value(&r.a1.rouge_l));
    let _ = writeln!(s, "| BLEU-4 | {} |", fmt_value(&r.a1.bleu4));
    let _ = writeln!(s, "| Jaccard | {} |", fmt_value(&r.a1.jaccard));
    let _ = writeln!(s, "| Levenshtein | {} |", fmt_value(&r.a1.levenshtein));

    s.push_str("\n## A.2 Semantic\n\n| Metric | Value |\n|---|---|\n");
    match &r.a2.pca {
        Metric::Computed { value } => {
            for (enc, p) in value {
                let _ = writeln!(s, "| PCA-95 ({enc}) | {} of {} dims, {} rows |", p.components, p.dims, p.rows_used);
            }
        }
        Metric::Skipped { reason } => {
            let _ = writeln!(s, "| PCA-95 | n/a ({reason}) |");
        }
    }
    let _ = writeln!(s, "| BERTScore | {} |", fmt_value(&r.a2.bertscore));
    match r.a2.verb_object.value() {
        Some(m) => {
            let _ = writeln!(s, "| Verb/object pairs | {} verbs, {} objects, {} arcs |", m.verbs.len(), m.objects.len(), m.total());
        }
        None => {
            let _ = writeln!(s, "| Verb/object pairs | n/a ({}) |", skipped(&r.a2.verb_object).unwrap_or(""));
        }
    }
    if let Some(classes) = r.a2.adverbial_classes.value() {
        let parts: Vec<String> = classes.iter().map(|(k, v)| format!("{} {v}", k.as_str())).collect();
        let _ = writeln!(s, "| Modifier classes | {} |", parts.join(", "));
    }
    if let Some(n) = r.a2.numeric_profile.value() {
        let _ = writeln!(s, "| Numerals | {} distinct, {} tokens |", n.counts.len(), n.counts.values().sum::<u64>());
    }

    s.push_str("\n## A.3 Structural\n\n| Metric | Value |\n|---|---|\n");
    let _ = writeln!(s, "| Tree Kernel (x100) | {} |", fmt_value(&r.a3.tree_kernel));
    match &r.a3.structures {
        Metric::Computed { value } => {
            for (flag, f) in &value.flags {
                let se = f.se.map(|v| format!(" (SE {v:.4})")).unwrap_or_default();
                let _ = writeln!(s, "| {flag} | {} ({:.2}%){se} |", f.count, f.fraction * 100.0);
            }
        }
        Metric::Skipped { reason } => {
            let _ = writeln!(s, "| Structures | n/a ({reason}) |");
        }
    }
    match &r.a3.pos_patterns {
        Metric::Computed { value } => {
            s.push_str("\n| Rank | POS pattern | Share | Exemplar |\n|---|---|---|---|\n");
            for (i, p) in value.top.iter().take(10).enumerate() {
                let _ = writeln!(s, "| {} | {} | {:.2}% | {} |", i + 1, p.pattern, p.frequency * 100.0, p.exemplar);
            }
            if value.other_count > 0 {
                let _ = writeln!(s, "| | other | {:.2}% | |", value.other_frequency * 100.0);
            }
        }
        Metric::Skipped { reason } => {
            let _ = writeln!(s, "| POS patterns | n/a ({reason}) |");
        }
    }

    if !r.notes.is_empty() {
        s.push_str("\n## Notes\n\n");
        for n in &r.notes {
            let _ = writeln!(s, "- {n}");
        }
    }
    s
}
