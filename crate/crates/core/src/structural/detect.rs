use serde::{Deserialize, Serialize};

use crate::ingest::{ParsedInstruction, Upos};
use crate::lexicons::Lexicons;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct StructureLabel {
    pub negation: bool,
    pub conditional: bool,
    pub multi_step: bool,
    pub cycle: bool,
}

impl StructureLabel {
    pub const FLAGS: [&'static str; 4] = ["negation", "conditional", "multi_step", "cycle"];

    pub fn flags(&self) -> [bool; 4] {
        [self.negation, self.conditional, self.multi_step, self.cycle]
    }
}

/// Rule-based structure flags from a dependency parse plus the clean text.
///
/// Every rule is a disjunction over tokens, so text markers (the keyword
/// path) can only add flags.
pub fn detect_structures(parse: &ParsedInstruction, text: &str, lex: &Lexicons) -> StructureLabel {
    let words: Vec<&str> = text.split(' ').filter(|w| !w.is_empty()).collect();
    let lemma = |i: usize| parse.tokens[i].lemma.to_lowercase();
    let surface = |i: usize| parse.tokens[i].surface.to_lowercase();

    let in_lex = |set: &std::collections::BTreeSet<String>, i: usize| set.contains(&lemma(i)) || set.contains(&surface(i));

    let negation = parse.tokens.iter().enumerate().any(|(i, t)| {
        if t.deprel.contains("neg") {
            return true;
        }
        if lemma(i) == "no" || surface(i) == "no" {
            return t.upos == Upos::Det || (t.index == 1 && t.upos == Upos::Intj);
        }
        in_lex(&lex.negation, i)
    }) || words.iter().any(|w| *w != "no" && lex.negation.contains(*w));

    let conditional = parse.tokens.iter().enumerate().any(|(i, t)| {
        in_lex(&lex.conditional, i)
            && (matches!(t.base_deprel(), "mark" | "advcl")
                || parse.head_of(t).is_some_and(|h| h.base_deprel() == "advcl"))
    }) || parse.tokens.first().is_some_and(|t| t.lemma.eq_ignore_ascii_case("if"))
        || words.first() == Some(&"if");

    let verb_roots = parse.tokens.iter().filter(|t| t.head == 0 && t.upos == Upos::Verb).count();
    let multi_step = verb_roots >= 2
        || parse.tokens.iter().enumerate().any(|(i, t)| {
            (t.upos == Upos::Verb && t.base_deprel() == "conj" && parse.head_of(t).is_some_and(|h| h.upos == Upos::Verb))
                || in_lex(&lex.sequence, i)
        })
        || words.iter().any(|w| lex.sequence.contains(*w));

    let cycle = (0..parse.tokens.len()).any(|i| in_lex(&lex.cycle, i)) || words.iter().any(|w| lex.cycle.contains(*w));

    StructureLabel {
        negation,
        conditional,
        multi_step,
        cycle,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::TokenAnnotation;

    fn parse(rows: &[(&str, &str, Upos, usize, &str)]) -> ParsedInstruction {
        let tokens = rows
            .iter()
            .enumerate()
            .map(|(i, &(w, lemma, upos, head, deprel))| TokenAnnotation {
                index: i + 1,
                surface: w.into(),
                lemma: lemma.into(),
                upos,
                head,
                deprel: deprel.into(),
            })
            .collect();
        ParsedInstruction::new("r", tokens).unwrap()
    }

    fn label(n: bool, c: bool, m: bool, y: bool) -> StructureLabel {
        StructureLabel {
            negation: n,
            conditional: c,
            multi_step: m,
            cycle: y,
        }
    }

    #[test]
    fn coordinated_verbs() {
        use Upos::*;
        let p = parse(&[
            ("pick", "pick", Verb, 0, "root"),
            ("coke", "coke", Noun, 3, "compound"),
            ("can", "can", Noun, 1, "obj"),
            ("and", "and", Cconj, 5, "cc"),
            ("place", "place", Verb, 1, "conj"),
        ]);
        assert_eq!(detect_structures(&p, "pick coke can and place", &Lexicons::default()), label(false, false, true, false));
    }

    #[test]
    fn nominal_coordination_is_not_multi_step() {
        use Upos::*;
        let p = parse(&[
            ("get", "get", Verb, 0, "root"),
            ("salt", "salt", Noun, 1, "obj"),
            ("and", "and", Cconj, 4, "cc"),
            ("pepper", "pepper", Noun, 2, "conj"),
        ]);
        assert_eq!(detect_structures(&p, "get salt and pepper", &Lexicons::default()), StructureLabel::default());
    }

    #[test]
    fn no_needs_determiner_or_initial_interjection() {
        use Upos::*;
        let lex = Lexicons::default();
        let det = parse(&[("take", "take", Verb, 0, "root"), ("no", "no", Det, 3, "det"), ("photos", "photo", Noun, 1, "obj")]);
        assert!(detect_structures(&det, "take no photos", &lex).negation);
        let intj = parse(&[("no", "no", Intj, 2, "discourse"), ("stop", "stop", Verb, 0, "root")]);
        assert!(detect_structures(&intj, "no stop", &lex).negation);
        let noun = parse(&[("press", "press", Verb, 0, "root"), ("no", "no", Noun, 1, "obj")]);
        assert!(!detect_structures(&noun, "press no", &lex).negation);
    }

    #[test]
    fn if_mark_and_when() {
        use Upos::*;
        let lex = Lexicons::default();
        let p = parse(&[
            ("stop", "stop", Verb, 0, "root"),
            ("when", "when", Sconj, 4, "mark"),
            ("you", "you", Pron, 4, "nsubj"),
            ("arrive", "arrive", Verb, 1, "advcl"),
        ]);
        assert!(detect_structures(&p, "stop when you arrive", &lex).conditional);
        // "when" as a plain question word does not count
        let q = parse(&[("when", "when", Adv, 2, "advmod"), ("stop", "stop", Verb, 0, "root")]);
        assert!(!detect_structures(&q, "when stop", &lex).conditional);
    }

    #[test]
    fn multiple_roots() {
        use Upos::*;
        let p = parse(&[("turn", "turn", Verb, 0, "root"), ("stop", "stop", Verb, 0, "root")]);
        assert!(detect_structures(&p, "turn stop", &Lexicons::default()).multi_step);
    }

    #[test]
    fn keyword_path_only_adds_flags() {
        use Upos::*;
        let lex = Lexicons::default();
        let p = parse(&[("go", "go", Verb, 0, "root"), ("left", "left", Adv, 1, "advmod")]);
        let before = detect_structures(&p, "go left", &lex);
        let after = detect_structures(&p, "go left and then repeat", &lex);
        assert_eq!(before, StructureLabel::default());
        assert!(after.multi_step && after.cycle);
    }
}
