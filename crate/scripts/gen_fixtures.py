#!/usr/bin/env python3
"""Regenerates the files under fixtures/. Output is deterministic."""

import json
import random
import struct
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent / "fixtures"

RT1_WORDS = (
    "bottle apple chip upright green and pick chocolate open bag 7up over blueberry shelf rxbar "
    "bottom redbull door paper drawer counter brown knock on plastic bowl move left coke fridge blue "
    "jalapeno close right sponge into place orange pepsi water from white of rice top can near middle banana"
).split()

RT1_SENTENCES = [
    "place water bottle into white bowl",
    "move redbull can near 7up can",
    "pick coke can from bottom drawer and place on counter",
    "pick apple from top drawer and place on counter",
    "pick green rice chip bag from bottom drawer and place on counter",
]


def write_jsonl(path, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


def conllu_block(sent_id, text, rows):
    """rows: (form, lemma, upos, head, deprel)"""
    lines = [f"# sent_id = {sent_id}", f"# text = {text}"]
    for i, (form, lemma, upos, head, deprel) in enumerate(rows, 1):
        lines.append("\t".join([str(i), form, lemma, upos, "_", "_", str(head), deprel, "_", "_"]))
    return "\n".join(lines) + "\n\n"


# ---------------------------------------------------------------- rt1

def gen_rt1():
    d = ROOT / "rt1"
    write_jsonl(d / "vocabulary.jsonl", [{"id": f"w{i:02d}", "text": w} for i, w in enumerate(RT1_WORDS)])
    write_jsonl(d / "examples.jsonl", [{"id": f"rt1-{i}", "text": s, "dataset": "rt1"} for i, s in enumerate(RT1_SENTENCES)])


# ---------------------------------------------------------------- exemplars
# Hand-written dependency parses for sixteen structure exemplars, with the
# single label each one is expected to carry.

EXEMPLARS = [
    ("negation", "i don't know what the red thing was", [
        ("i", "i", "PRON", 4, "nsubj"), ("do", "do", "AUX", 4, "aux"), ("n't", "not", "PART", 4, "advmod"),
        ("know", "know", "VERB", 0, "root"), ("what", "what", "PRON", 4, "ccomp"), ("the", "the", "DET", 8, "det"),
        ("red", "red", "ADJ", 8, "amod"), ("thing", "thing", "NOUN", 5, "nsubj"), ("was", "be", "AUX", 5, "cop")]),
    ("negation", "you are not at the total entrance", [
        ("you", "you", "PRON", 7, "nsubj"), ("are", "be", "AUX", 7, "cop"), ("not", "not", "PART", 7, "advmod"),
        ("at", "at", "ADP", 7, "case"), ("the", "the", "DET", 7, "det"), ("total", "total", "ADJ", 7, "amod"),
        ("entrance", "entrance", "NOUN", 0, "root")]),
    ("negation", "This step does not exist.", [
        ("this", "this", "DET", 2, "det"), ("step", "step", "NOUN", 5, "nsubj"), ("does", "do", "AUX", 5, "aux"),
        ("not", "not", "PART", 5, "advmod"), ("exist", "exist", "VERB", 0, "root")]),
    ("negation", "video frames not showing", [
        ("video", "video", "NOUN", 2, "compound"), ("frames", "frame", "NOUN", 4, "nsubj"),
        ("not", "not", "PART", 4, "advmod"), ("showing", "show", "VERB", 0, "root")]),
    ("conditional", "see if there's a doorway", [
        ("see", "see", "VERB", 0, "root"), ("if", "if", "SCONJ", 4, "mark"), ("there", "there", "PRON", 4, "expl"),
        ("'s", "be", "VERB", 1, "advcl"), ("a", "a", "DET", 6, "det"), ("doorway", "doorway", "NOUN", 4, "nsubj")]),
    ("conditional", "and i'll point out when there's a doorway so we can count them", [
        ("and", "and", "CCONJ", 4, "cc"), ("i", "i", "PRON", 4, "nsubj"), ("'ll", "will", "AUX", 4, "aux"),
        ("point", "point", "VERB", 0, "root"), ("out", "out", "ADP", 4, "compound:prt"),
        ("when", "when", "SCONJ", 8, "mark"), ("there", "there", "PRON", 8, "expl"), ("'s", "be", "VERB", 4, "advcl"),
        ("a", "a", "DET", 10, "det"), ("doorway", "doorway", "NOUN", 8, "nsubj"), ("so", "so", "SCONJ", 14, "mark"),
        ("we", "we", "PRON", 14, "nsubj"), ("can", "can", "AUX", 14, "aux"), ("count", "count", "VERB", 4, "advcl"),
        ("them", "they", "PRON", 14, "obj")]),
    ("conditional", "PLACE THE YELLOW TOPWEL SIDE IF THE TABLE", [
        ("place", "place", "VERB", 0, "root"), ("the", "the", "DET", 5, "det"), ("yellow", "yellow", "ADJ", 5, "amod"),
        ("topwel", "topwel", "NOUN", 5, "compound"), ("side", "side", "NOUN", 1, "obj"), ("if", "if", "SCONJ", 8, "mark"),
        ("the", "the", "DET", 8, "det"), ("table", "table", "NOUN", 1, "advcl")]),
    ("multi_step", "pick coke can from bottom drawer and place on counter", [
        ("pick", "pick", "VERB", 0, "root"), ("coke", "coke", "NOUN", 3, "compound"), ("can", "can", "NOUN", 1, "obj"),
        ("from", "from", "ADP", 6, "case"), ("bottom", "bottom", "ADJ", 6, "amod"), ("drawer", "drawer", "NOUN", 1, "obl"),
        ("and", "and", "CCONJ", 8, "cc"), ("place", "place", "VERB", 1, "conj"), ("on", "on", "ADP", 10, "case"),
        ("counter", "counter", "NOUN", 8, "obl")]),
    ("multi_step", "pick apple from top drawer and place on counter", [
        ("pick", "pick", "VERB", 0, "root"), ("apple", "apple", "NOUN", 1, "obj"), ("from", "from", "ADP", 5, "case"),
        ("top", "top", "ADJ", 5, "amod"), ("drawer", "drawer", "NOUN", 1, "obl"), ("and", "and", "CCONJ", 7, "cc"),
        ("place", "place", "VERB", 1, "conj"), ("on", "on", "ADP", 9, "case"), ("counter", "counter", "NOUN", 7, "obl")]),
    ("multi_step", "open the top drawer and put the bowl inside", [
        ("open", "open", "VERB", 0, "root"), ("the", "the", "DET", 4, "det"), ("top", "top", "ADJ", 4, "amod"),
        ("drawer", "drawer", "NOUN", 1, "obj"), ("and", "and", "CCONJ", 6, "cc"), ("put", "put", "VERB", 1, "conj"),
        ("the", "the", "DET", 8, "det"), ("bowl", "bowl", "NOUN", 6, "obj"), ("inside", "inside", "ADV", 6, "advmod")]),
    ("multi_step", "go towards the drawer and place the pink object", [
        ("go", "go", "VERB", 0, "root"), ("towards", "towards", "ADP", 4, "case"), ("the", "the", "DET", 4, "det"),
        ("drawer", "drawer", "NOUN", 1, "obl"), ("and", "and", "CCONJ", 6, "cc"), ("place", "place", "VERB", 1, "conj"),
        ("the", "the", "DET", 9, "det"), ("pink", "pink", "ADJ", 9, "amod"), ("object", "object", "NOUN", 6, "obj")]),
    ("multi_step", "take the purple block and rotate it right", [
        ("take", "take", "VERB", 0, "root"), ("the", "the", "DET", 4, "det"), ("purple", "purple", "ADJ", 4, "amod"),
        ("block", "block", "NOUN", 1, "obj"), ("and", "and", "CCONJ", 6, "cc"), ("rotate", "rotate", "VERB", 1, "conj"),
        ("it", "it", "PRON", 6, "obj"), ("right", "right", "ADV", 6, "advmod")]),
    ("cycle", "continue moving forward", [
        ("continue", "continue", "VERB", 0, "root"), ("moving", "move", "VERB", 1, "xcomp"),
        ("forward", "forward", "ADV", 2, "advmod")]),
    ("cycle", "take a photo every forty five degrees", [
        ("take", "take", "VERB", 0, "root"), ("a", "a", "DET", 3, "det"), ("photo", "photo", "NOUN", 1, "obj"),
        ("every", "every", "DET", 7, "det"), ("forty", "forty", "NUM", 6, "compound"), ("five", "five", "NUM", 7, "nummod"),
        ("degrees", "degree", "NOUN", 1, "obl:tmod")]),
    ("cycle", "Move over to the right side of the desk again.", [
        ("move", "move", "VERB", 0, "root"), ("over", "over", "ADV", 1, "advmod"), ("to", "to", "ADP", 6, "case"),
        ("the", "the", "DET", 6, "det"), ("right", "right", "ADJ", 6, "amod"), ("side", "side", "NOUN", 1, "obl"),
        ("of", "of", "ADP", 9, "case"), ("the", "the", "DET", 9, "det"), ("desk", "desk", "NOUN", 6, "nmod"),
        ("again", "again", "ADV", 1, "advmod")]),
    ("cycle", "Walk to your left until you see a loaf of bread on the counter top.", [
        ("walk", "walk", "VERB", 0, "root"), ("to", "to", "ADP", 4, "case"), ("your", "your", "PRON", 4, "nmod:poss"),
        ("left", "left", "NOUN", 1, "obl"), ("until", "until", "SCONJ", 7, "mark"), ("you", "you", "PRON", 7, "nsubj"),
        ("see", "see", "VERB", 1, "advcl"), ("a", "a", "DET", 9, "det"), ("loaf", "loaf", "NOUN", 7, "obj"),
        ("of", "of", "ADP", 11, "case"), ("bread", "bread", "NOUN", 9, "nmod"), ("on", "on", "ADP", 15, "case"),
        ("the", "the", "DET", 15, "det"), ("counter", "counter", "NOUN", 15, "compound"), ("top", "top", "NOUN", 7, "obl")]),
]

FLAGS = ["negation", "conditional", "multi_step", "cycle"]


def gen_exemplars():
    d = ROOT / "structures"
    corpus, labels, blocks = [], [], []
    for i, (label, text, rows) in enumerate(EXEMPLARS):
        sid = f"ex{i:02d}"
        corpus.append({"id": sid, "text": text})
        labels.append({"id": sid, "annotator": "exemplar-key", **{f: f == label for f in FLAGS}})
        blocks.append(conllu_block(sid, " ".join(r[0] for r in rows), rows))
    write_jsonl(d / "exemplars.jsonl", corpus)
    write_jsonl(d / "exemplars.gold.jsonl", labels)
    (d / "exemplars.conllu").write_text("".join(blocks), encoding="utf-8")


# ---------------------------------------------------------------- bundle

OBJECTS = ["block", "bowl", "sponge", "cup", "can", "apple", "towel", "spoon"]
ADJS = ["red", "blue", "green", "white", "small"]
PLACES = ["drawer", "table", "shelf", "counter", "sink"]


def np_(det, adj, noun):
    kids = [f"(DET {det})"] + ([f"(ADJ {adj})"] if adj else []) + [f"(NOUN {noun})"]
    return "(NP " + " ".join(kids) + ")"


def t_simple(r):
    a, o, p = r.choice(ADJS), r.choice(OBJECTS), r.choice(PLACES)
    rows = [("pick", "pick", "VERB", 0, "root"), ("the", "the", "DET", 4, "det"), (a, a, "ADJ", 4, "amod"),
            (o, o, "NOUN", 1, "obj"), ("from", "from", "ADP", 7, "case"), ("the", "the", "DET", 7, "det"),
            (p, p, "NOUN", 1, "obl")]
    tree = f"(S (VP (VERB pick) {np_('the', a, o)} (PP (ADP from) {np_('the', None, p)})))"
    return f"Pick the {a} {o} from the {p}.", rows, tree, {}


def t_multi(r):
    o, p = r.choice(OBJECTS), r.choice(PLACES)
    rows = [("pick", "pick", "VERB", 0, "root"), ("the", "the", "DET", 3, "det"), (o, o, "NOUN", 1, "obj"),
            ("and", "and", "CCONJ", 5, "cc"), ("place", "place", "VERB", 1, "conj"), ("it", "it", "PRON", 5, "obj"),
            ("on", "on", "ADP", 9, "case"), ("the", "the", "DET", 9, "det"), (p, p, "NOUN", 5, "obl")]
    tree = (f"(S (VP (VP (VERB pick) {np_('the', None, o)}) (CCONJ and) "
            f"(VP (VERB place) (NP (PRON it)) (PP (ADP on) {np_('the', None, p)}))))")
    return f"pick the {o} and place it on the {p}", rows, tree, {"multi_step"}


def t_then(r):
    p, o = r.choice(PLACES), r.choice(OBJECTS)
    rows = [("open", "open", "VERB", 0, "root"), ("the", "the", "DET", 3, "det"), (p, p, "NOUN", 1, "obj"),
            ("then", "then", "ADV", 5, "advmod"), ("push", "push", "VERB", 1, "parataxis"),
            ("the", "the", "DET", 7, "det"), (o, o, "NOUN", 5, "obj")]
    tree = (f"(S (VP (VERB open) {np_('the', None, p)}) (ADVP (ADV then)) "
            f"(VP (VERB push) {np_('the', None, o)}))")
    return f"Open the {p}, then push the {o}", rows, tree, {"multi_step"}


def t_neg(r):
    a, o = r.choice(ADJS), r.choice(OBJECTS)
    rows = [("do", "do", "AUX", 3, "aux"), ("not", "not", "PART", 3, "advmod"), ("move", "move", "VERB", 0, "root"),
            ("the", "the", "DET", 6, "det"), (a, a, "ADJ", 6, "amod"), (o, o, "NOUN", 3, "obj")]
    tree = f"(S (VP (AUX do) (PART not) (VP (VERB move) {np_('the', a, o)})))"
    return f"Do not move the {a} {o}!", rows, tree, {"negation"}


def t_cond(r):
    p = r.choice(PLACES)
    rows = [("if", "if", "SCONJ", 5, "mark"), ("the", "the", "DET", 3, "det"), (p, p, "NOUN", 5, "nsubj"),
            ("is", "be", "AUX", 5, "cop"), ("open", "open", "ADJ", 6, "advcl"), ("close", "close", "VERB", 0, "root"),
            ("it", "it", "PRON", 6, "obj")]
    tree = (f"(S (SBAR (SCONJ if) (S {np_('the', None, p)} (VP (AUX is) (ADJP (ADJ open))))) "
            f"(VP (VERB close) (NP (PRON it))))")
    return f"if the {p} is open, close it", rows, tree, {"conditional"}


def t_again(r):
    o = r.choice(OBJECTS)
    rows = [("wipe", "wipe", "VERB", 0, "root"), ("the", "the", "DET", 3, "det"), (o, o, "NOUN", 1, "obj"),
            ("again", "again", "ADV", 1, "advmod")]
    tree = f"(S (VP (VERB wipe) {np_('the', None, o)} (ADVP (ADV again))))"
    return f"wipe the {o} again", rows, tree, {"cycle"}


def t_keep(r):
    o = r.choice(OBJECTS)
    rows = [("keep", "keep", "VERB", 0, "root"), ("pushing", "push", "VERB", 1, "xcomp"),
            ("the", "the", "DET", 4, "det"), (o, o, "NOUN", 2, "obj")]
    tree = f"(S (VP (VERB keep) (S (VP (VERB pushing) {np_('the', None, o)}))))"
    return f"keep pushing the {o}", rows, tree, {"cycle"}


def t_neg_multi(r):
    o = r.choice(OBJECTS)
    rows = [("pick", "pick", "VERB", 0, "root"), ("up", "up", "ADP", 1, "compound:prt"), ("the", "the", "DET", 4, "det"),
            (o, o, "NOUN", 1, "obj"), ("and", "and", "CCONJ", 8, "cc"), ("do", "do", "AUX", 8, "aux"),
            ("not", "not", "PART", 8, "advmod"), ("drop", "drop", "VERB", 1, "conj"), ("it", "it", "PRON", 8, "obj")]
    tree = (f"(S (VP (VP (VERB pick) (ADP up) {np_('the', None, o)}) (CCONJ and) "
            f"(VP (AUX do) (PART not) (VP (VERB drop) (NP (PRON it))))))")
    return f"Pick up the {o} and do not drop it.", rows, tree, {"negation", "multi_step"}


def t_cond_cycle(r):
    o = r.choice(OBJECTS)
    rows = [("when", "when", "SCONJ", 4, "mark"), ("the", "the", "DET", 3, "det"), (o, o, "NOUN", 4, "nsubj"),
            ("falls", "fall", "VERB", 5, "advcl"), ("pick", "pick", "VERB", 0, "root"), ("it", "it", "PRON", 5, "obj"),
            ("up", "up", "ADP", 5, "compound:prt"), ("again", "again", "ADV", 5, "advmod")]
    tree = (f"(S (SBAR (SCONJ when) (S {np_('the', None, o)} (VP (VERB falls)))) "
            f"(VP (VERB pick) (NP (PRON it)) (ADP up) (ADVP (ADV again))))")
    return f"When the {o} falls, pick it up again", rows, tree, {"conditional", "cycle"}


TEMPLATES = [t_simple, t_simple, t_simple, t_multi, t_multi, t_then, t_neg, t_cond, t_again, t_keep,
             t_neg_multi, t_cond_cycle]


def write_icem(path, index_path, ids, matrix):
    n, d = matrix.shape
    with open(path, "wb") as f:
        f.write(b"ICEM" + bytes([1]) + struct.pack("<II", n, d))
        f.write(matrix.astype("<f4").tobytes())
    write_jsonl(index_path, [{"row": i, "id": s} for i, s in enumerate(ids)])


def write_icte(path, entries, dims):
    with open(path, "wb") as f:
        f.write(b"ICTE" + bytes([1]))
        for sid, m in entries:
            b = sid.encode("utf-8")
            f.write(struct.pack("<I", len(b)) + b + struct.pack("<II", m.shape[0], dims))
            f.write(m.astype("<f4").tobytes())


def gen_bundle():
    d = ROOT / "bundle"
    r = random.Random(17)
    items = []
    for i in range(56):
        items.append(TEMPLATES[i % len(TEMPLATES)](r))
    # a few exact repeats so duplication statistics have something to count
    for j in (0, 3, 7, 9):
        items.append(items[j])

    corpus, gold, blocks, trees = [], [], [], []
    for i, (text, rows, tree, flags) in enumerate(items):
        sid = f"b{i:03d}"
        corpus.append({"id": sid, "text": text, "dataset": "bundle"})
        gold.append({"id": sid, "annotator": "fixture-key", **{f: f in flags for f in FLAGS}})
        blocks.append(conllu_block(sid, " ".join(x[0] for x in rows), rows))
        trees.append({"id": sid, "ptb": tree})
    write_jsonl(d / "corpus.jsonl", corpus)
    write_jsonl(d / "gold.jsonl", gold)
    write_jsonl(d / "trees.jsonl", trees)
    (d / "parses.conllu").write_text("".join(blocks), encoding="utf-8")

    ids = [c["id"] for c in corpus]
    texts = [" ".join(x[0] for x in it[1]) for it in items]
    # sentence embeddings are a function of the clean text, so repeats share rows
    for name, dims, rank, seed in (("enc-a", 24, 6, 1), ("enc-b", 16, 10, 2)):
        g = np.random.default_rng(seed)
        basis = g.standard_normal((rank, dims))
        uniq = sorted(set(texts))
        coef = {t: g.standard_normal(rank) for t in uniq}
        noise = {t: 0.01 * g.standard_normal(dims) for t in uniq}
        m = np.stack([coef[t] @ basis + noise[t] for t in texts])
        write_icem(d / f"{name}.icem", d / f"{name}.index.jsonl", ids, m)

    g = np.random.default_rng(3)
    vocab = sorted({w for t in texts for w in t.split()})
    wv = {w: g.standard_normal(12) for w in vocab}
    entries = [(sid, np.stack([wv[w] for w in t.split()])) for sid, t in zip(ids, texts)]
    write_icte(d / "tokens.icte", entries, 12)

    (d / "config.toml").write_text(
        "sample_size = 20\n"
        "trials = 3\n"
        "seed = 17\n"
        'require = ["a1", "a2", "a3", "gold"]\n'
        "\n[tree_kernel]\nlambda = 0.4\n",
        encoding="utf-8",
    )


# ---------------------------------------------------------------- pos patterns

WORDS = {
    "VERB": ["pick", "place", "move", "put", "push", "grab", "lift", "slide"],
    "NOUN": ["water", "bottle", "bowl", "can", "apple", "sponge", "drawer", "counter", "cup", "towel", "block", "bag"],
    "ADJ": ["white", "blue", "green", "red", "small", "large"],
    "ADP": ["into", "near", "on", "from", "onto"],
    "DET": ["the", "a"],
    "ADV": ["slowly", "forward", "carefully"],
    "PRON": ["it"],
    "CCONJ": ["and"],
}

TOP = "VERB NOUN NOUN ADP ADJ NOUN"
OTHER_PATTERNS = [
    ("VERB NOUN NOUN ADP NOUN NOUN", 10),
    ("VERB DET NOUN ADP DET NOUN", 9),
    ("VERB DET ADJ NOUN ADP DET NOUN", 9),
    ("VERB NOUN ADP NOUN", 8),
    ("VERB ADJ NOUN", 8),
    ("VERB DET ADJ NOUN", 7),
    ("VERB NOUN ADV", 7),
    ("VERB PRON ADP DET NOUN", 7),
    ("VERB DET NOUN ADV", 6),
    ("VERB NOUN CCONJ VERB NOUN", 6),
    ("VERB ADJ NOUN NOUN", 6),
    ("VERB ADJ NOUN ADP NOUN", 6),
]


def gen_pos():
    d = ROOT / "pos"
    r = random.Random(11)
    plan = [(TOP, 11)] + OTHER_PATTERNS
    assert sum(c for _, c in plan) == 100
    seen, corpus, blocks = set(), [], []
    for pattern, count in plan:
        tags = pattern.split()
        made = 0
        while made < count:
            words = [r.choice(WORDS[t]) for t in tags]
            text = " ".join(words)
            if text in seen:
                continue
            seen.add(text)
            sid = f"p{len(corpus):03d}"
            rows = [(w, w, t, 0 if k == 0 else 1, "root" if k == 0 else "dep") for k, (w, t) in enumerate(zip(words, tags))]
            corpus.append({"id": sid, "text": text, "dataset": "pos"})
            blocks.append(conllu_block(sid, text, rows))
            made += 1
    order = list(range(len(corpus)))
    r.shuffle(order)
    write_jsonl(d / "corpus.jsonl", [corpus[i] for i in order])
    (d / "parses.conllu").write_text("".join(blocks[i] for i in order), encoding="utf-8")


if __name__ == "__main__":
    gen_rt1()
    gen_exemplars()
    gen_bundle()
    gen_pos()
