use std::collections::BTreeMap;

use serde::Serialize;

use crate::ingest::{ParsedInstruction, Upos};

/// Verb x object co-occurrence counts. Rows and columns are sorted lemmas and
/// only lemmas with at least one count appear.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct VerbObjectMatrix {
    pub verbs: Vec<String>,
    pub objects: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl VerbObjectMatrix {
    pub fn from_pairs<I: IntoIterator<Item = (String, String)>>(pairs: I) -> Self {
        let mut cells: BTreeMap<(String, String), u64> = BTreeMap::new();
        for p in pairs {
            *cells.entry(p).or_default() += 1;
        }
        let mut verbs: Vec<String> = cells.keys().map(|(v, _)| v.clone()).collect();
        verbs.dedup();
        let mut objects: Vec<String> = cells.keys().map(|(_, o)| o.clone()).collect();
        objects.sort();
        objects.dedup();
        let mut counts = vec![vec![0; objects.len()]; verbs.len()];
        for ((v, o), c) in &cells {
            let i = verbs.binary_search(v).expect("verb present");
            let j = objects.binary_search(o).expect("object present");
            counts[i][j] = *c;
        }
        VerbObjectMatrix { verbs, objects, counts }
    }

    pub fn get(&self, verb: &str, object: &str) -> u64 {
        match (
            self.verbs.binary_search_by(|v| v.as_str().cmp(verb)),
            self.objects.binary_search_by(|o| o.as_str().cmp(object)),
        ) {
            (Ok(i), Ok(j)) => self.counts[i][j],
            _ => 0,
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.verbs.is_empty()
    }

    /// Non-zero cells as `(verb, object, count)` in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (&str, &str, u64)> {
        self.counts.iter().enumerate().flat_map(move |(i, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(move |(j, &c)| (self.verbs[i].as_str(), self.objects[j].as_str(), c))
        })
    }
}

/// `(verb, object)` arcs of one sentence. Particles (`compound:prt`) are
/// appended to the verb and compound modifiers are merged into the object.
pub fn verb_object_pairs(parse: &ParsedInstruction) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for tok in &parse.tokens {
        if !(tok.base_deprel() == "obj" || tok.deprel == "dobj") {
            continue;
        }
        let Some(head) = parse.head_of(tok) else { continue };
        if head.upos != Upos::Verb {
            continue;
        }
        let mut verb = head.lemma.to_lowercase();
        for prt in parse.children_of(head.index).filter(|t| t.deprel == "compound:prt") {
            verb.push(' ');
            verb.push_str(&prt.lemma.to_lowercase());
        }
        // compound children and the object itself, in sentence order
        let object: Vec<String> = parse
            .tokens
            .iter()
            .filter(|t| t.index == tok.index || (t.head == tok.index && t.deprel == "compound"))
            .map(|t| t.lemma.to_lowercase())
            .collect();
        out.push((verb, object.join(" ")));
    }
    out
}

pub fn verb_object_matrix<'a, I: IntoIterator<Item = &'a ParsedInstruction>>(parses: I) -> VerbObjectMatrix {
    VerbObjectMatrix::from_pairs(parses.into_iter().flat_map(verb_object_pairs))
}

/// Object -> number of distinct verbs it appears with.
pub fn unique_verbs_per_object(m: &VerbObjectMatrix) -> BTreeMap<String, usize> {
    m.objects
        .iter()
        .enumerate()
        .map(|(j, o)| (o.clone(), m.counts.iter().filter(|row| row[j] > 0).count()))
        .collect()
}

/// Distinct-verb count -> number of objects with that count.
pub fn verbs_per_object_histogram(per_object: &BTreeMap<String, usize>) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for &k in per_object.values() {
        *h.entry(k).or_default() += 1;
    }
    h
}
