//! Property tests for the metric, detector and PCA invariants.

use std::collections::BTreeMap;

use proptest::prelude::*;

use lingaudit::audit::SamplingPlan;
use lingaudit::ingest::{ConstituencyTree, EmbeddingMatrix, ParsedInstruction, TokenAnnotation, TreeNode, Upos};
use lingaudit::lexical::{bleu4, compression_ratio, jaccard, levenshtein, pairwise_mean, rouge_l, MetricId};
use lingaudit::lexicons::Lexicons;
use lingaudit::semantic::{pca_components_95, verb_object_matrix};
use lingaudit::structural::{
    detect_structures, pos_pattern_frequencies, structure_labels, summarize_patterns, tree_kernel, tree_kernel_raw,
    TAIL_THRESHOLD,
};
use lingaudit::{Cleaner, Corpus};

fn tokens() -> impl Strategy<Value = Vec<String>> {
    proptest::collection::vec("[a-e]", 1..12)
}

fn sentence() -> impl Strategy<Value = String> {
    proptest::collection::vec("[a-f]{1,3}", 1..8).prop_map(|w| w.join(" "))
}

const LEMMAS: &[&str] = &[
    "pick", "place", "can", "not", "no", "if", "when", "then", "again", "and", "keep", "the", "drawer", "up",
];
const DEPRELS: &[&str] = &["obj", "conj", "advcl", "mark", "cc", "nsubj", "advmod", "compound:prt", "det", "neg", "obl"];

fn parse(id: String) -> impl Strategy<Value = ParsedInstruction> {
    proptest::collection::vec((0..LEMMAS.len(), 0..Upos::ALL.len(), 0..DEPRELS.len(), any::<usize>()), 1..9).prop_map(
        move |toks| {
            let tokens = toks
                .iter()
                .enumerate()
                .map(|(i, &(l, u, d, h))| TokenAnnotation {
                    index: i + 1,
                    surface: LEMMAS[l].to_string(),
                    lemma: LEMMAS[l].to_string(),
                    upos: Upos::ALL[u],
                    // heads point backwards, so the first token is the root
                    head: if i == 0 { 0 } else { 1 + h % i },
                    deprel: if i == 0 { "root".to_string() } else { DEPRELS[d].to_string() },
                })
                .collect();
            ParsedInstruction::new(id.clone(), tokens).unwrap()
        },
    )
}

fn parsed_corpus() -> impl Strategy<Value = (Corpus, BTreeMap<String, ParsedInstruction>)> {
    (1usize..12)
        .prop_flat_map(|n| proptest::collection::vec(parse("tmp".into()), n))
        .prop_map(|ps| {
            let texts: Vec<String> = ps
                .iter()
                .map(|p| p.tokens.iter().map(|t| t.surface.as_str()).collect::<Vec<_>>().join(" "))
                .collect();
            let corpus = Corpus::from_texts("prop", &texts, &Cleaner::Default).unwrap();
            let parses = corpus
                .records()
                .iter()
                .zip(ps)
                .map(|(r, p)| (r.id.clone(), ParsedInstruction::new(r.id.clone(), p.tokens).unwrap()))
                .collect();
            (corpus, parses)
        })
}

fn permuted(corpus: &Corpus, rot: usize) -> Corpus {
    let mut recs = corpus.records().to_vec();
    let k = rot % recs.len();
    recs.rotate_left(k);
    recs.reverse();
    Corpus::new(corpus.dataset_id(), recs, "perm", corpus.cleaner_id()).unwrap()
}

fn tree() -> impl Strategy<Value = ConstituencyTree> {
    let leaf = "[xy]".prop_map(TreeNode::leaf);
    let node = leaf.prop_recursive(3, 12, 3, |inner| {
        ("[AB]", proptest::collection::vec(inner, 1..3)).prop_map(|(l, c)| TreeNode::node(l, c))
    });
    ("[AB]", proptest::collection::vec(node, 1..3)).prop_map(|(l, c)| ConstituencyTree::new(TreeNode::node(l, c)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pairwise_metrics_are_symmetric(a in tokens(), b in tokens()) {
        prop_assert_eq!(rouge_l(&a, &b).unwrap(), rouge_l(&b, &a).unwrap());
        prop_assert_eq!(bleu4(&a, &b).unwrap(), bleu4(&b, &a).unwrap());
        prop_assert_eq!(jaccard(&a, &b).unwrap(), jaccard(&b, &a).unwrap());
        let (x, y) = (a.join(" "), b.join(" "));
        prop_assert_eq!(levenshtein(&x, &y), levenshtein(&y, &x));
    }

    #[test]
    fn perfect_scores_mean_equality(a in tokens(), b in tokens()) {
        prop_assert_eq!(rouge_l(&a, &b).unwrap() == 1.0, a == b);
        let sa: std::collections::BTreeSet<_> = a.iter().collect();
        let sb: std::collections::BTreeSet<_> = b.iter().collect();
        prop_assert_eq!(jaccard(&a, &b).unwrap() == 1.0, sa == sb);
        for m in [rouge_l(&a, &b).unwrap(), bleu4(&a, &b).unwrap(), jaccard(&a, &b).unwrap()] {
            prop_assert!((0.0..=1.0).contains(&m));
        }
    }

    #[test]
    fn levenshtein_is_a_metric(x in "[ab ]{0,12}", y in "[ab ]{0,12}", z in "[ab ]{0,12}") {
        prop_assert_eq!(levenshtein(&x, &x), 0);
        prop_assert_eq!(levenshtein(&x, &y) == 0, x == y);
        prop_assert!(levenshtein(&x, &z) <= levenshtein(&x, &y) + levenshtein(&y, &z));
    }

    #[test]
    fn doubling_never_lowers_compression(texts in proptest::collection::vec(sentence(), 1..40)) {
        let c = Corpus::from_texts("cr", &texts, &Cleaner::Default).unwrap();
        let doubled = Corpus::from_texts("cr", &[texts.clone(), texts].concat(), &Cleaner::Default).unwrap();
        prop_assert!(compression_ratio(&doubled).unwrap() >= compression_ratio(&c).unwrap());
    }

    #[test]
    fn pairwise_mean_ignores_thread_count(texts in proptest::collection::vec(sentence(), 2..60), seed in any::<u64>()) {
        let c = Corpus::from_texts("pm", &texts, &Cleaner::Default).unwrap();
        let plan = SamplingPlan::new(10, 3, seed).unwrap();
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| pairwise_mean(&c, MetricId::Bleu4, &plan, false).unwrap())
        };
        let (a, b) = (run(1), run(3));
        prop_assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        prop_assert_eq!(a.std.to_bits(), b.std.to_bits());
    }

    #[test]
    fn tree_kernel_symmetric_and_self_one(a in tree(), b in tree()) {
        let k = tree_kernel(&a, &b, 0.4).unwrap();
        prop_assert_eq!(k, tree_kernel(&b, &a, 0.4).unwrap());
        prop_assert!((0.0..=1.0).contains(&k));
        prop_assert!((tree_kernel(&a, &a, 0.4).unwrap() - 1.0).abs() < 1e-12);
        let mut prev = 0.0;
        for lambda in [0.1, 0.2, 0.4, 0.7, 1.0] {
            let raw = tree_kernel_raw(&a, &b, lambda).unwrap();
            prop_assert!(raw >= prev);
            prev = raw;
        }
    }

    #[test]
    fn marker_insertion_only_adds_flags(p in parse("m".into())) {
        let lex = Lexicons::default();
        let text: String = p.tokens.iter().map(|t| t.surface.as_str()).collect::<Vec<_>>().join(" ");
        let before = detect_structures(&p, &text, &lex);
        let after = detect_structures(&p, &format!("{text} and then repeat"), &lex);
        prop_assert!(after.multi_step && after.cycle);
        for (b, a) in before.flags().iter().zip(after.flags()) {
            prop_assert!(!b || a);
        }
    }

    #[test]
    fn labels_follow_records_under_permutation((c, parses) in parsed_corpus(), rot in 0usize..16) {
        let lex = Lexicons::default();
        let base: BTreeMap<String, _> = c.records().iter().map(|r| r.id.clone())
            .zip(structure_labels(&c, &parses, &lex).unwrap()).collect();
        let p = permuted(&c, rot);
        for (r, l) in p.records().iter().zip(structure_labels(&p, &parses, &lex).unwrap()) {
            prop_assert_eq!(base[&r.id], l);
        }
    }

    #[test]
    fn pattern_shares_sum_to_one((c, parses) in parsed_corpus()) {
        let freqs = pos_pattern_frequencies(&parses, &c).unwrap();
        let s = summarize_patterns(&freqs, TAIL_THRESHOLD);
        let total: f64 = s.top.iter().map(|f| f.frequency).sum::<f64>() + s.other_frequency;
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert_eq!(s.top.iter().map(|f| f.count).sum::<usize>() + s.other_count, s.n_unique);
    }

    #[test]
    fn verb_object_totals_permute_and_add((c, parses) in parsed_corpus(), rot in 0usize..16) {
        let p = permuted(&c, rot);
        let by_order = |corpus: &Corpus| verb_object_matrix(corpus.records().iter().map(|r| &parses[&r.id]));
        prop_assert_eq!(by_order(&c), by_order(&p));
        let all = by_order(&c).total();
        let half = c.len() / 2;
        let first = verb_object_matrix(c.records()[..half].iter().map(|r| &parses[&r.id])).total();
        let second = verb_object_matrix(c.records()[half..].iter().map(|r| &parses[&r.id])).total();
        prop_assert_eq!(all, first + second);
    }
}

fn gaussian_matrix(seed: u64, n: usize, d: usize) -> Vec<f32> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let scales: Vec<f32> = (0..d).map(|j| 1.0 / (1.0 + j as f32)).collect();
    (0..n * d).map(|k| rng.sample::<f32, _>(rand_distr::StandardNormal) * scales[k % d]).collect()
}

fn emb(n: usize, d: usize, v: Vec<f32>) -> EmbeddingMatrix {
    EmbeddingMatrix::new(d, v, (0..n).map(|i| i.to_string()).collect(), "p").unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Power-of-two scaling and signed coordinate permutations are exact in f32,
    /// so the component count has to match exactly.
    #[test]
    fn pca_invariant_to_scale_and_signed_permutation(
        seed in any::<u64>(), n in 3usize..40, d in 1usize..12, exp in -6i32..6, perm_seed in any::<u64>()
    ) {
        let base = gaussian_matrix(seed, n, d);
        let k = pca_components_95(&emb(n, d, base.clone())).unwrap();

        let s = 2f32.powi(exp);
        let scaled: Vec<f32> = base.iter().map(|v| v * s).collect();
        prop_assert_eq!(pca_components_95(&emb(n, d, scaled)).unwrap(), k);

        let mut order: Vec<usize> = (0..d).collect();
        let mut state = perm_seed;
        for i in (1..d).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (state >> 33) as usize % (i + 1));
        }
        let signs: Vec<f32> = (0..d).map(|j| if (perm_seed >> (j % 64)) & 1 == 1 { -1.0 } else { 1.0 }).collect();
        let rotated: Vec<f32> = (0..n * d).map(|idx| {
            let (i, j) = (idx / d, idx % d);
            base[i * d + order[j]] * signs[j]
        }).collect();
        prop_assert_eq!(pca_components_95(&emb(n, d, rotated)).unwrap(), k);
    }
}
