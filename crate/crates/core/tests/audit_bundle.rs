use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use lingaudit::audit::{run_audit, to_canonical_json, AnnotationBundle, AuditConfig, EmbeddingSource, Metric};
use lingaudit::ingest::{read_conllu, read_corpus, read_gold, read_token_embeddings, read_trees};
use lingaudit::Cleaner;

fn bundle_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/bundle")
}

fn config() -> AuditConfig {
    let mut cfg = AuditConfig::default();
    cfg.plan.sample_size = 20;
    cfg
}

fn full_bundle(corpus: &lingaudit::Corpus) -> AnnotationBundle {
    let d = bundle_dir();
    AnnotationBundle {
        parses: Some(read_conllu(&d.join("parses.conllu"), corpus).unwrap()),
        trees: Some(read_trees(&d.join("trees.jsonl"), corpus).unwrap()),
        embeddings: ["enc-a", "enc-b"]
            .iter()
            .map(|e| EmbeddingSource::File {
                data: d.join(format!("{e}.icem")),
                index: d.join(format!("{e}.index.jsonl")),
            })
            .collect(),
        token_embeddings: Some(read_token_embeddings(&d.join("tokens.icte")).unwrap()),
        gold: Some(read_gold(&d.join("gold.jsonl"), corpus).unwrap()),
    }
}

#[test]
fn full_bundle_matches_independent_counts() {
    let corpus = read_corpus(&bundle_dir().join("corpus.jsonl"), &Cleaner::Default).unwrap();
    let ann = full_bundle(&corpus);
    let run = run_audit(&corpus, &ann, &config()).unwrap();
    let r = &run.report;

    let stats = &r.a1.stats;
    let texts: BTreeSet<&str> = corpus.records().iter().map(|x| x.clean_text.as_str()).collect();
    let words: BTreeSet<&str> = texts.iter().flat_map(|t| t.split(' ')).collect();
    assert_eq!(stats.n_sentences, 60);
    assert_eq!(stats.n_unique, texts.len());
    assert_eq!(stats.n_unigrams, words.len());

    // the generator planted rank 6 and rank 10 structure under small noise
    let pca = r.a2.pca.value().unwrap();
    assert_eq!(pca["enc-a"].rows_used, texts.len());
    assert!((1..=6).contains(&pca["enc-a"].components), "{:?}", pca["enc-a"]);
    assert!((1..=10).contains(&pca["enc-b"].components), "{:?}", pca["enc-b"]);

    // detector counts equal the gold key counts, since the key was written to agree
    let gold = ann.gold.as_ref().unwrap();
    let s = r.a3.structures.value().unwrap();
    for (i, flag) in ["negation", "conditional", "multi_step", "cycle"].iter().enumerate() {
        let want = gold.labels.values().filter(|l| l.flags()[i]).count();
        assert_eq!(s.flags[*flag].count, want, "{flag}");
        assert_eq!(s.flags[*flag].disagreement, Some(0.0));
    }

    for m in [&r.a1.rouge_l, &r.a1.bleu4, &r.a1.jaccard, &r.a2.bertscore] {
        let v = m.value().unwrap();
        assert_eq!(v.trials, 3);
    }
    let k = r.a3.tree_kernel.value().unwrap();
    assert!(k.mean > 0.0 && k.mean <= 100.0);
    assert!(run.patterns.iter().map(|p| p.count).sum::<usize>() == texts.len());
}

#[test]
fn repeated_runs_serialize_identically() {
    let corpus = read_corpus(&bundle_dir().join("corpus.jsonl"), &Cleaner::Default).unwrap();
    let ann = full_bundle(&corpus);
    let a = to_canonical_json(&run_audit(&corpus, &ann, &config()).unwrap().report).unwrap();
    let b = to_canonical_json(&run_audit(&corpus, &ann, &config()).unwrap().report).unwrap();
    assert_eq!(a, b);
}

#[test]
fn corpus_only_audit_skips_without_failing() {
    let corpus = read_corpus(&bundle_dir().join("corpus.jsonl"), &Cleaner::Default).unwrap();
    let run = run_audit(&corpus, &AnnotationBundle::default(), &config()).unwrap();
    let r = &run.report;
    assert!(r.a1.rouge_l.is_computed());
    assert!(r.a1.compression_ratio.is_computed());
    let skipped: BTreeMap<&str, String> = [
        ("pca", &r.a2.pca as &dyn Reason),
        ("bertscore", &r.a2.bertscore),
        ("verb_object", &r.a2.verb_object),
        ("tree_kernel", &r.a3.tree_kernel),
        ("structures", &r.a3.structures),
    ]
    .into_iter()
    .map(|(k, m)| (k, m.reason().expect(k)))
    .collect();
    assert_eq!(skipped["pca"], "missing embeddings");
    assert_eq!(skipped["bertscore"], "missing token_embeddings");
    assert_eq!(skipped["tree_kernel"], "missing trees");
    assert_eq!(skipped["structures"], "missing conllu");
}

trait Reason {
    fn reason(&self) -> Option<String>;
}

impl<T> Reason for Metric<T> {
    fn reason(&self) -> Option<String> {
        match self {
            Metric::Skipped { reason } => Some(reason.clone()),
            Metric::Computed { .. } => None,
        }
    }
}

#[test]
fn partial_parses_share_across_duplicates() {
    let d = bundle_dir();
    let corpus = read_corpus(&d.join("corpus.jsonl"), &Cleaner::Default).unwrap();
    let mut parses = read_conllu(&d.join("parses.conllu"), &corpus).unwrap();
    // b056..b059 repeat earlier sentences; dropping their parses changes nothing
    for id in ["b056", "b057", "b058", "b059"] {
        parses.remove(id);
    }
    let partial = AnnotationBundle {
        parses: Some(parses),
        ..AnnotationBundle::default()
    };
    let full = AnnotationBundle {
        parses: Some(read_conllu(&d.join("parses.conllu"), &corpus).unwrap()),
        ..AnnotationBundle::default()
    };
    let a = run_audit(&corpus, &partial, &config()).unwrap().report;
    let b = run_audit(&corpus, &full, &config()).unwrap().report;
    assert_eq!(
        serde_json::to_value(&a.a3.structures).unwrap(),
        serde_json::to_value(&b.a3.structures).unwrap()
    );
}
