use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::PathBuf;

use log::info;

use super::config::AuditConfig;
use super::report::{AnnotationCoverage, AuditReport, ConfigEcho, KernelEcho, Metric, SectionA1, SectionA2, SectionA3, SCHEMA_VERSION};
use super::sampling::{pairwise_mean_by, MetricValue, GENERATOR_ID};
use crate::error::{Error, Result};
use crate::ingest::{
    ConstituencyTree, EmbeddingMatrix, EmbeddingRows, GoldStructureLabels, ParsedInstruction, TokenEmbeddingSet, Upos,
};
use crate::lexical::{compression_ratio, pairwise_mean, pos_vocabulary, MetricId, GZIP_LEVEL};
use crate::model::{align_annotations, compute_stats, Corpus};
use crate::semantic::{
    adverbial_profile, bertscore_prepared, numeric_profile, pca, pca_streaming, unique_verbs_per_object,
    verb_object_matrix, verbs_per_object_histogram, PcaResult, TokenVectors,
};
use crate::structural::{
    pos_pattern_frequencies, prepared_kernel, structure_report, summarize_patterns, PatternFrequency, PreparedTree,
    ProductionTable, TAIL_THRESHOLD,
};

/// Sentence embeddings, either loaded or streamed from an ICEM file.
#[derive(Debug, Clone)]
pub enum EmbeddingSource {
    Matrix(EmbeddingMatrix),
    File { data: PathBuf, index: PathBuf },
}

/// Optional annotations for one corpus, keyed by record id.
#[derive(Debug, Clone, Default)]
pub struct AnnotationBundle {
    pub parses: Option<BTreeMap<String, ParsedInstruction>>,
    pub trees: Option<BTreeMap<String, ConstituencyTree>>,
    pub embeddings: Vec<EmbeddingSource>,
    pub token_embeddings: Option<TokenEmbeddingSet>,
    pub gold: Option<GoldStructureLabels>,
}

/// A finished audit: the serializable report plus the full pattern table for CSV output.
#[derive(Debug, Clone)]
pub struct AuditRun {
    pub report: AuditReport,
    pub patterns: Vec<PatternFrequency>,
}

const PAIRWISE_LEXICAL: [MetricId; 4] = [MetricId::RougeL, MetricId::Bleu4, MetricId::Jaccard, MetricId::Levenshtein];
const VOCABULARY_CATEGORIES: [Upos; 3] = [Upos::Noun, Upos::Verb, Upos::Adv];

/// Annotations for the pairwise population (all records, or first occurrences
/// when `on_unique`), dropping records with no annotation.
fn population<'a, T>(corpus: &Corpus, map: &'a BTreeMap<String, T>, on_unique: bool) -> (Vec<&'a T>, usize) {
    let aligned = align_annotations(corpus, map);
    let mut seen = HashSet::new();
    let mut base = 0;
    let mut out = Vec::new();
    for (rec, a) in corpus.records().iter().zip(aligned) {
        if on_unique && !seen.insert(rec.clean_text.as_str()) {
            continue;
        }
        base += 1;
        if let Some(a) = a {
            out.push(a);
        }
    }
    (out, base)
}

fn coverage<T>(corpus: &Corpus, map: &BTreeMap<String, T>) -> AnnotationCoverage {
    AnnotationCoverage {
        covered: align_annotations(corpus, map).iter().filter(|a| a.is_some()).count(),
        records: corpus.len(),
    }
}

struct Notes(Vec<String>);

impl Notes {
    fn trials(&mut self, name: &str, m: &Metric<MetricValue>, population: usize, cfg: &AuditConfig) {
        if let Some(v) = m.value() {
            if v.trials < cfg.plan.trials {
                self.0.push(format!(
                    "{name}: population of {population} records does not exceed sample_size {}; trials collapsed to {}",
                    cfg.plan.sample_size, v.trials
                ));
            }
        }
    }

    fn partial(&mut self, name: &str, kind: &str, have: usize, base: usize) {
        if have < base {
            self.0.push(format!("{name}: computed over {have} of {base} records that have {kind}"));
        }
    }
}

/// Outer error: unreadable input or ids outside the corpus. Inner error: the
/// rows were read but PCA is undefined for them.
fn pca_for(source: &EmbeddingSource, corpus: &Corpus, on_all: bool) -> Result<(String, Result<PcaResult>)> {
    let texts: HashMap<&str, &str> = corpus.records().iter().map(|r| (r.id.as_str(), r.clean_text.as_str())).collect();
    let mut seen: HashSet<&str> = HashSet::new();
    let mut bad: Option<String> = None;
    let mut keep = |id: &str| -> bool {
        match texts.get(id) {
            None => {
                bad.get_or_insert_with(|| id.to_string());
                false
            }
            Some(text) => on_all || seen.insert(text),
        }
    };
    let (encoder, result) = match source {
        EmbeddingSource::Matrix(m) => {
            let rows: Vec<usize> = m.row_ids().iter().enumerate().filter(|(_, id)| keep(id)).map(|(i, _)| i).collect();
            (m.encoder_id().to_string(), pca(m, Some(&rows)))
        }
        EmbeddingSource::File { data, index } => {
            let mut reader = EmbeddingRows::open(data, index)?;
            let encoder = reader.encoder_id();
            match pca_streaming(&mut reader, |_, id| keep(id)) {
                Err(e @ (Error::Binary { .. } | Error::Io { .. } | Error::Syntax { .. })) => return Err(e),
                r => (encoder, r),
            }
        }
    };
    if let Some(id) = bad {
        return Err(Error::invalid(format!("embedding row id {id} ({encoder}) is not in the corpus")));
    }
    Ok((encoder, result))
}

/// Computes every metric the supplied annotations allow. Missing or partial
/// annotations produce skipped metrics and notes; malformed embedding files
/// and ids outside the corpus are errors.
pub fn run_audit(corpus: &Corpus, ann: &AnnotationBundle, cfg: &AuditConfig) -> Result<AuditRun> {
    cfg.validate()?;
    let plan = &cfg.plan;
    let on_unique = cfg.pairwise_on_unique;
    let mut notes = Notes(Vec::new());
    let stats = compute_stats(corpus)?;
    if let Some(g) = &ann.gold {
        let ids = corpus.id_set();
        if let Some(id) = g.labels.keys().find(|id| !ids.contains(id.as_str())) {
            return Err(Error::invalid(format!("gold id {id} not in corpus")));
        }
    }
    let pairwise_base = if on_unique { stats.n_unique } else { stats.n_sentences };
    info!("auditing {} ({} records)", corpus.dataset_id(), corpus.len());

    // A.1
    let lexical: Vec<Metric<MetricValue>> = PAIRWISE_LEXICAL
        .iter()
        .map(|&m| {
            let v = Metric::from_result(pairwise_mean(corpus, m, plan, on_unique));
            notes.trials(m.as_str(), &v, pairwise_base, cfg);
            v
        })
        .collect();
    let [rouge_l, bleu4, jaccard, levenshtein]: [Metric<MetricValue>; 4] = lexical.try_into().expect("four metrics");
    let pos_vocab = match &ann.parses {
        None => Metric::missing("conllu"),
        Some(p) => Metric::Computed {
            value: VOCABULARY_CATEGORIES
                .iter()
                .map(|&c| (c.as_str().to_string(), pos_vocabulary(p.values(), c).into_iter().collect()))
                .collect(),
        },
    };
    let a1 = SectionA1 {
        stats,
        compression_ratio: Metric::from_result(compression_ratio(corpus)),
        rouge_l,
        bleu4,
        jaccard,
        levenshtein,
        pos_vocabulary: pos_vocab,
    };

    // A.2
    let pca_metric = if ann.embeddings.is_empty() {
        Metric::missing("embeddings")
    } else {
        let mut by_encoder = BTreeMap::new();
        let mut failure = None;
        for source in &ann.embeddings {
            let (enc, r) = pca_for(source, corpus, cfg.pca_on_all)?;
            match r {
                Ok(r) => {
                    if by_encoder.insert(enc.clone(), r).is_some() {
                        return Err(Error::invalid(format!("encoder id {enc} supplied twice")));
                    }
                }
                Err(e) => {
                    failure.get_or_insert(format!("{enc}: {e}"));
                }
            }
        }
        notes.0.push(format!(
            "pca: {} rows (pca_on_all = {})",
            if cfg.pca_on_all { "all" } else { "unique-sentence" },
            cfg.pca_on_all
        ));
        match failure {
            Some(reason) => Metric::skipped(reason),
            None => Metric::Computed { value: by_encoder },
        }
    };

    let bertscore = match &ann.token_embeddings {
        None => Metric::missing("token_embeddings"),
        Some(set) => {
            let (items, base) = population(corpus, set.as_map(), on_unique);
            notes.partial("bertscore", "token embeddings", items.len(), base);
            let prepared: Result<Vec<TokenVectors>> = items.iter().map(|v| TokenVectors::new(v, set.dims())).collect();
            let m = Metric::from_result(
                prepared.and_then(|p| pairwise_mean_by(&p, plan, MetricId::Bertscore.as_str(), |a, b| bertscore_prepared(a, b))),
            );
            notes.trials("bertscore", &m, items.len(), cfg);
            m
        }
    };

    let (verb_object, unique_verbs, verbs_hist, adverbials, adverbial_classes, numerics) = match &ann.parses {
        None => (
            Metric::missing("conllu"),
            Metric::missing("conllu"),
            Metric::missing("conllu"),
            Metric::missing("conllu"),
            Metric::missing("conllu"),
            Metric::missing("conllu"),
        ),
        Some(p) => {
            let aligned: Vec<&ParsedInstruction> = align_annotations(corpus, p).into_iter().flatten().collect();
            notes.partial("verb/object and modifier profiles", "parses", aligned.len(), corpus.len());
            let m = verb_object_matrix(aligned.iter().copied());
            let per = unique_verbs_per_object(&m);
            let hist = verbs_per_object_histogram(&per);
            let adv = adverbial_profile(aligned.iter().copied(), &cfg.lexicons);
            let classes = adv.class_totals();
            (
                Metric::Computed { value: m },
                Metric::Computed { value: per },
                Metric::Computed { value: hist },
                Metric::Computed { value: adv },
                Metric::Computed { value: classes },
                Metric::Computed {
                    value: numeric_profile(aligned.iter().copied(), &cfg.lexicons),
                },
            )
        }
    };
    let a2 = SectionA2 {
        pca: pca_metric,
        bertscore,
        verb_object,
        unique_verbs_per_object: unique_verbs,
        verbs_per_object_histogram: verbs_hist,
        adverbial_profile: adverbials,
        adverbial_classes,
        numeric_profile: numerics,
    };

    // A.3
    let mut patterns = Vec::new();
    let (pos_patterns, structures) = match &ann.parses {
        None => (Metric::missing("conllu"), Metric::missing("conllu")),
        Some(p) => {
            let pats = match pos_pattern_frequencies(p, corpus) {
                Ok(f) => {
                    let s = summarize_patterns(&f, TAIL_THRESHOLD);
                    patterns = f;
                    Metric::Computed { value: s }
                }
                Err(e) => Metric::skipped(e.to_string()),
            };
            let structures = Metric::from_result(structure_report(corpus, p, ann.gold.as_ref(), &cfg.lexicons));
            (pats, structures)
        }
    };
    if ann.gold.is_some() && ann.parses.is_none() {
        notes.0.push("gold labels supplied without parses; structure SEs not computed".to_string());
    }
    let tree_kernel = match &ann.trees {
        None => Metric::missing("trees"),
        Some(trees) => {
            let (items, base) = population(corpus, trees, on_unique);
            notes.partial("tree_kernel", "trees", items.len(), base);
            let mut table = ProductionTable::default();
            let prepared: Result<Vec<PreparedTree>> = items
                .iter()
                .map(|t| PreparedTree::new(t, cfg.tree_kernel_lambda, &mut table))
                .collect();
            let m = Metric::from_result(prepared.and_then(|p| {
                pairwise_mean_by(&p, plan, MetricId::TreeKernel.as_str(), |a, b| Ok(prepared_kernel(a, b)))
                    .map(|v| v.scaled(100.0))
            }));
            notes.trials("tree_kernel", &m, items.len(), cfg);
            m
        }
    };
    let a3 = SectionA3 {
        pos_patterns,
        tree_kernel,
        structures,
    };

    let mut annotations = BTreeMap::new();
    if let Some(p) = &ann.parses {
        annotations.insert("conllu".to_string(), coverage(corpus, p));
    }
    if let Some(t) = &ann.trees {
        annotations.insert("trees".to_string(), coverage(corpus, t));
    }
    if let Some(t) = &ann.token_embeddings {
        annotations.insert("token_embeddings".to_string(), coverage(corpus, t.as_map()));
    }
    if let Some(g) = &ann.gold {
        annotations.insert("gold".to_string(), coverage(corpus, &g.labels));
    }
    if let Some(m) = a2.pca.value() {
        for (enc, r) in m {
            annotations.insert(
                format!("embeddings:{enc}"),
                AnnotationCoverage {
                    covered: r.rows_used,
                    records: if cfg.pca_on_all { corpus.len() } else { a1.stats.n_unique },
                },
            );
        }
    }

    let report = AuditReport {
        schema_version: SCHEMA_VERSION,
        tool: format!("lingaudit {}", env!("CARGO_PKG_VERSION")),
        dataset_id: corpus.dataset_id().to_string(),
        source_path: corpus.source_path().to_string(),
        config: ConfigEcho {
            cleaner: corpus.cleaner_id().to_string(),
            fillers: cfg.cleaner.fillers(),
            sample_size: plan.sample_size,
            trials: plan.trials,
            seed: plan.seed,
            generator: GENERATOR_ID.to_string(),
            pairwise_on_unique: on_unique,
            pca_on_all: cfg.pca_on_all,
            gzip_level: GZIP_LEVEL,
            tree_kernel: KernelEcho {
                variant: "subset_tree".to_string(),
                lambda: cfg.tree_kernel_lambda,
                scale: 100.0,
            },
            lexicons: cfg.lexicon_sources.clone(),
        },
        annotations,
        notes: notes.0,
        a1,
        a2,
        a3,
    };
    Ok(AuditRun { report, patterns })
}
