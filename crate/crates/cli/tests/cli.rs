use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn bundle(f: &str) -> String {
    fixtures().join("bundle").join(f).display().to_string()
}

fn lingaudit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lingaudit"))
        .env("LINGAUDIT_THREADS", "2")
        .args(args)
        .output()
        .unwrap()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn help_lists_subcommands_and_environment() {
    let out = lingaudit(&["--help"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for word in ["ingest", "audit", "compare", "validate", "LINGAUDIT_THREADS", "RUST_LOG"] {
        assert!(text.contains(word), "--help lacks {word}");
    }
    for sub in ["ingest", "audit", "compare", "validate"] {
        assert!(lingaudit(&[sub, "--help"]).status.success(), "{sub} --help");
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(lingaudit(&["audit"]).status.code(), Some(2));
    assert_eq!(lingaudit(&["nonsense"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("o").display().to_string();
    let r = lingaudit(&["audit", "--corpus", "/nonexistent/corpus.jsonl", "--out", &out_dir]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("/nonexistent/corpus.jsonl"));
}

#[test]
fn missing_required_annotation_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("o").display().to_string();
    let r = lingaudit(&["audit", "--corpus", &bundle("corpus.jsonl"), "--require", "a3", "--out", &out_dir]);
    assert_eq!(r.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&r.stderr).contains("conllu"));
}

#[test]
fn unequal_embedding_and_index_counts_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("o").display().to_string();
    let ea = bundle("enc-a.icem");
    let r = lingaudit(&["audit", "--corpus", &bundle("corpus.jsonl"), "--embeddings", &ea, "--out", &out_dir]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn corpus_only_audit_skips_annotation_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("o");
    let r = lingaudit(&["audit", "--corpus", &bundle("corpus.jsonl"), "--sample-size", "10", "--out", out_dir.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let summary = stdout_json(&r);
    assert_eq!(summary["command"], "audit");
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["a1"]["rouge_l"]["status"], "computed");
    assert_eq!(report["a2"]["pca"]["status"], "skipped");
    assert_eq!(report["a2"]["pca"]["reason"], "missing embeddings");
    assert_eq!(report["a3"]["tree_kernel"]["reason"], "missing trees");
    for f in ["report.md", "length_histogram.csv", "structure_bars.csv", "pattern_bars.csv"] {
        assert!(out_dir.join(f).exists(), "{f} not written");
    }
}

#[test]
fn ingest_then_audit_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cleaned = dir.path().join("clean.jsonl");
    let r = lingaudit(&["ingest", "--input", &bundle("corpus.jsonl"), "--out", cleaned.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let s = stdout_json(&r);
    assert_eq!(s["kept"], 60);
    assert_eq!(s["dropped"], 0);
    let first = std::fs::read_to_string(&cleaned).unwrap();
    let first_line: serde_json::Value = serde_json::from_str(first.lines().next().unwrap()).unwrap();
    assert_eq!(first_line["id"], "b000");
    assert!(!first_line["text"].as_str().unwrap().contains('.'));
}

#[test]
fn validate_reports_coverage_and_violations() {
    let ok = lingaudit(&[
        "validate",
        "--corpus",
        &bundle("corpus.jsonl"),
        "--conllu",
        &bundle("parses.conllu"),
        "--embeddings",
        &bundle("enc-a.icem"),
        "--emb-index",
        &bundle("enc-a.index.jsonl"),
    ]);
    assert!(ok.status.success());
    let v = stdout_json(&ok);
    assert_eq!(v["ok"], true);
    assert_eq!(v["files"]["conllu"]["coverage"], 1.0);

    // parses from another corpus reference unknown ids
    let other = fixtures().join("pos/parses.conllu").display().to_string();
    let bad = lingaudit(&["validate", "--corpus", &bundle("corpus.jsonl"), "--conllu", &other]);
    assert_eq!(bad.status.code(), Some(2));
    let v = stdout_json(&bad);
    assert_eq!(v["ok"], false);
    let msg = v["files"]["conllu"]["violations"][0].as_str().unwrap();
    assert!(msg.contains("unknown sent_id"), "{msg}");
}

#[test]
fn compare_two_reports() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let pos = fixtures().join("pos");
    let r = lingaudit(&["audit", "--corpus", &bundle("corpus.jsonl"), "--conllu", &bundle("parses.conllu"), "--sample-size", "10", "--out", a.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let r = lingaudit(&[
        "audit",
        "--corpus",
        pos.join("corpus.jsonl").to_str().unwrap(),
        "--conllu",
        pos.join("parses.conllu").to_str().unwrap(),
        "--sample-size",
        "10",
        "--out",
        b.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let cmp = dir.path().join("cmp");
    let r = lingaudit(&[
        "compare",
        a.join("report.json").to_str().unwrap(),
        b.join("report.json").to_str().unwrap(),
        "--out",
        cmp.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let md = std::fs::read_to_string(cmp.join("comparison.md")).unwrap();
    assert!(md.contains("| bundle |") && md.contains("| pos |"), "{md}");
    for f in ["comparison.csv", "pca_correlations.csv", "overlap_noun.csv", "overlap_verb.csv"] {
        assert!(cmp.join(f).exists(), "{f} not written");
    }

    // one report is a usage error
    let r = lingaudit(&["compare", a.join("report.json").to_str().unwrap(), "--out", cmp.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
}
