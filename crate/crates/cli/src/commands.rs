use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use log::info;
use serde_json::{json, Value};
use tempfile::NamedTempFile;

use lingaudit::audit::{compare_reports, plot_csvs, render_markdown, run_audit, AnnotationBundle, AuditReport, EmbeddingSource, Metric};
use lingaudit::ingest::{
    parse_conllu, read_conllu, read_corpus_with, read_gold, read_lexicon, read_token_embeddings, read_trees, write_corpus,
    EmbeddingRows, ReadOptions,
};
use lingaudit::{Cleaner, Corpus};

use crate::config::resolve;
use crate::{AnnotationArgs, AuditArgs, CompareArgs, Failure, IngestArgs, ValidateArgs};

/// Writes `bytes` to `path` through a temporary file in the same directory.
fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = NamedTempFile::new_in(dir).with_context(|| format!("creating temp file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn summary(v: Value) {
    println!("{v}");
}

pub fn ingest(args: &IngestArgs) -> Result<ExitCode, Failure> {
    let fillers = args.fillers.as_deref().map(read_lexicon).transpose()?;
    let cleaner = Cleaner::from_id(&args.cleaner, fillers)?;
    let opts = ReadOptions {
        cleaner,
        dataset_id: args.dataset.clone(),
        split_sentences: args.split_sentences,
    };
    let (corpus, s) = read_corpus_with(&args.input, &opts)?;
    let mut buf = Vec::new();
    write_corpus(&corpus, &mut buf)?;
    write_atomic(&args.out, &buf)?;
    summary(json!({
        "command": "ingest",
        "dataset": corpus.dataset_id(),
        "cleaner": corpus.cleaner_id(),
        "kept": s.kept,
        "dropped": s.dropped,
        "out": args.out.display().to_string(),
    }));
    Ok(ExitCode::SUCCESS)
}

fn embedding_pairs(a: &AnnotationArgs) -> anyhow::Result<Vec<(PathBuf, PathBuf)>> {
    if a.embeddings.len() != a.emb_index.len() {
        bail!(
            "--embeddings given {} times but --emb-index {} times; pass one index per embedding file",
            a.embeddings.len(),
            a.emb_index.len()
        );
    }
    Ok(a.embeddings.iter().cloned().zip(a.emb_index.iter().cloned()).collect())
}

fn load_bundle(corpus: &Corpus, a: &AnnotationArgs) -> anyhow::Result<AnnotationBundle> {
    let mut b = AnnotationBundle::default();
    if let Some(p) = &a.conllu {
        b.parses = Some(read_conllu(p, corpus)?);
    }
    if let Some(p) = &a.trees {
        b.trees = Some(read_trees(p, corpus)?);
    }
    for (data, index) in embedding_pairs(a)? {
        // header and index are checked now; rows are streamed during the audit
        EmbeddingRows::open(&data, &index)?;
        b.embeddings.push(EmbeddingSource::File { data, index });
    }
    if let Some(p) = &a.token_embeddings {
        let set = read_token_embeddings(p)?;
        let ids = corpus.id_set();
        if let Some((id, _)) = set.iter().find(|(id, _)| !ids.contains(id.as_str())) {
            bail!("{}: token embedding id {id} is not in the corpus", p.display());
        }
        b.token_embeddings = Some(set);
    }
    if let Some(p) = &a.gold {
        b.gold = Some(read_gold(p, corpus)?);
    }
    Ok(b)
}

fn supplied(a: &AnnotationArgs, kind: &str) -> bool {
    match kind {
        "conllu" => a.conllu.is_some(),
        "trees" => a.trees.is_some(),
        "embeddings" => !a.embeddings.is_empty(),
        "token_embeddings" => a.token_embeddings.is_some(),
        "gold" => a.gold.is_some(),
        _ => true,
    }
}

/// Metrics that depend on an annotation kind, with the reason when skipped.
fn skipped_for(report: &AuditReport, kind: &str) -> Vec<(String, String)> {
    fn reason<T>(name: &str, m: &Metric<T>) -> Option<(String, String)> {
        match m {
            Metric::Skipped { reason } => Some((name.to_string(), reason.clone())),
            Metric::Computed { .. } => None,
        }
    }
    let r = report;
    let list = match kind {
        "conllu" => vec![
            reason("a2.verb_object", &r.a2.verb_object),
            reason("a3.pos_patterns", &r.a3.pos_patterns),
            reason("a3.structures", &r.a3.structures),
        ],
        "trees" => vec![reason("a3.tree_kernel", &r.a3.tree_kernel)],
        "embeddings" => vec![reason("a2.pca", &r.a2.pca)],
        "token_embeddings" => vec![reason("a2.bertscore", &r.a2.bertscore)],
        "gold" => match r.a3.structures.value() {
            Some(s) if s.gold.is_some() => vec![],
            Some(_) => vec![Some(("a3.structures.gold".to_string(), "gold labels not applied".to_string()))],
            None => vec![reason("a3.structures", &r.a3.structures)],
        },
        _ => vec![],
    };
    list.into_iter().flatten().collect()
}

fn count_metrics(v: &Value, computed: &mut usize, skipped: &mut usize) {
    match v {
        Value::Object(m) => {
            match m.get("status").and_then(Value::as_str) {
                Some("computed") => *computed += 1,
                Some("skipped") => *skipped += 1,
                _ => {}
            }
            if m.get("status").is_none() {
                for x in m.values() {
                    count_metrics(x, computed, skipped);
                }
            }
        }
        Value::Array(a) => a.iter().for_each(|x| count_metrics(x, computed, skipped)),
        _ => {}
    }
}

pub fn audit(args: &AuditArgs) -> Result<ExitCode, Failure> {
    let resolved = resolve(args)?;
    for kind in &resolved.require {
        if !supplied(&args.annotations, kind) {
            return Err(Failure::MissingAnnotation(anyhow!("required annotation {kind} was not supplied")));
        }
    }
    let cfg = resolved.config;
    let opts = ReadOptions {
        cleaner: cfg.cleaner.clone(),
        dataset_id: args.dataset.clone(),
        split_sentences: false,
    };
    let (corpus, ingest) = read_corpus_with(&args.corpus, &opts)?;
    info!("read {} records ({} dropped)", ingest.kept, ingest.dropped);
    let bundle = load_bundle(&corpus, &args.annotations)?;
    let run = run_audit(&corpus, &bundle, &cfg)?;

    let json_text = run.report.to_canonical_json()?;
    std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    write_atomic(&args.out.join("report.json"), json_text.as_bytes())?;
    write_atomic(&args.out.join("report.md"), render_markdown(&run.report).as_bytes())?;
    for (name, body) in plot_csvs(&run)? {
        write_atomic(&args.out.join(name), body.as_bytes())?;
    }

    let value: Value = serde_json::from_str(&json_text)?;
    let (mut computed, mut skipped) = (0, 0);
    count_metrics(&value, &mut computed, &mut skipped);
    summary(json!({
        "command": "audit",
        "dataset": run.report.dataset_id,
        "records": corpus.len(),
        "computed": computed,
        "skipped": skipped,
        "out": args.out.display().to_string(),
    }));

    let missing: Vec<String> = resolved
        .require
        .iter()
        .flat_map(|k| skipped_for(&run.report, k))
        .map(|(m, r)| format!("{m} ({r})"))
        .collect();
    if !missing.is_empty() {
        return Err(Failure::MissingAnnotation(anyhow!("required metrics skipped: {}", missing.join("; "))));
    }
    Ok(ExitCode::SUCCESS)
}

pub fn compare(args: &CompareArgs) -> Result<ExitCode, Failure> {
    if args.reports.len() < 2 {
        return Err(Failure::Input(anyhow!("need at least two reports, got {}", args.reports.len())));
    }
    let mut reports = Vec::new();
    for p in &args.reports {
        let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?;
        reports.push((p.display().to_string(), v));
    }
    let c = compare_reports(&reports)?;
    std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    write_atomic(&args.out.join("comparison.md"), c.markdown.as_bytes())?;
    write_atomic(&args.out.join("comparison.csv"), c.table_csv.as_bytes())?;
    write_atomic(&args.out.join("pca_correlations.csv"), c.correlations_csv.as_bytes())?;
    for (name, body) in &c.overlaps {
        write_atomic(&args.out.join(name), body.as_bytes())?;
    }
    summary(json!({
        "command": "compare",
        "reports": reports.len(),
        "overlap_matrices": c.overlaps.len(),
        "out": args.out.display().to_string(),
    }));
    Ok(ExitCode::SUCCESS)
}

/// Result of checking one annotation file.
fn file_result(path: &Path, covered: usize, records: usize, violations: Vec<String>) -> Value {
    json!({
        "path": path.display().to_string(),
        "covered": covered,
        "records": records,
        "coverage": if records == 0 { 0.0 } else { covered as f64 / records as f64 },
        "violations": violations,
    })
}

fn check_icem(corpus: &Corpus, data: &Path, index: &Path) -> Value {
    let ids = corpus.id_set();
    let mut violations = Vec::new();
    let mut covered = 0;
    match EmbeddingRows::open(data, index) {
        Err(e) => violations.push(e.to_string()),
        Ok(mut rows) => {
            let mut seen = std::collections::HashSet::new();
            for id in rows.row_ids() {
                if !ids.contains(id.as_str()) {
                    violations.push(format!("row id {id} is not in the corpus"));
                } else if seen.insert(id.clone()) {
                    covered += 1;
                }
            }
            let mut buf = Vec::new();
            loop {
                match rows.next_block(&mut buf, 4096) {
                    Ok(Some(_)) => {}
                    Ok(None) => break,
                    Err(e) => {
                        violations.push(e.to_string());
                        break;
                    }
                }
            }
        }
    }
    file_result(data, covered, corpus.len(), violations)
}

/// Re-reads every supplied annotation file with the strict parsers and
/// reports id coverage and violations. Exits 2 when any file has a violation.
pub fn validate(args: &ValidateArgs) -> Result<ExitCode, Failure> {
    let cleaner = Cleaner::from_id(&args.cleaner, None)?;
    let opts = ReadOptions {
        cleaner,
        ..ReadOptions::default()
    };
    let (corpus, _) = read_corpus_with(&args.corpus, &opts)?;
    let n = corpus.len();
    let ids = corpus.id_set();
    let a = &args.annotations;
    let mut files: BTreeMap<String, Value> = BTreeMap::new();

    if let Some(p) = &a.conllu {
        let v = match std::fs::read_to_string(p) {
            Err(e) => file_result(p, 0, n, vec![format!("{}: {e}", p.display())]),
            Ok(text) => match parse_conllu(p, &text, Some(&ids)) {
                Ok(m) => file_result(p, m.len(), n, vec![]),
                Err(e) => file_result(p, 0, n, vec![e.to_string()]),
            },
        };
        files.insert("conllu".into(), v);
    }
    if let Some(p) = &a.trees {
        let v = match read_trees(p, &corpus) {
            Ok(m) => file_result(p, m.len(), n, vec![]),
            Err(e) => file_result(p, 0, n, vec![e.to_string()]),
        };
        files.insert("trees".into(), v);
    }
    for (data, index) in embedding_pairs(a)? {
        let key = format!("embeddings:{}", data.display());
        files.insert(key, check_icem(&corpus, &data, &index));
    }
    if let Some(p) = &a.token_embeddings {
        let v = match read_token_embeddings(p) {
            Ok(set) => {
                let bad: Vec<String> = set
                    .iter()
                    .filter(|(id, _)| !ids.contains(id.as_str()))
                    .map(|(id, _)| format!("id {id} is not in the corpus"))
                    .collect();
                let covered = set.iter().filter(|(id, _)| ids.contains(id.as_str())).count();
                file_result(p, covered, n, bad)
            }
            Err(e) => file_result(p, 0, n, vec![e.to_string()]),
        };
        files.insert("token_embeddings".into(), v);
    }
    if let Some(p) = &a.gold {
        let v = match read_gold(p, &corpus) {
            Ok(g) => file_result(p, g.labels.len(), n, vec![]),
            Err(e) => file_result(p, 0, n, vec![e.to_string()]),
        };
        files.insert("gold".into(), v);
    }

    let ok = files
        .values()
        .all(|v| v["violations"].as_array().is_some_and(|a| a.is_empty()));
    let report = json!({
        "command": "validate",
        "corpus": args.corpus.display().to_string(),
        "records": n,
        "ok": ok,
        "files": files,
    });
    if let Some(out) = &args.out {
        write_atomic(out, lingaudit::audit::to_canonical_json(&report)?.as_bytes())?;
    }
    summary(report);
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(2) })
}
