#!/usr/bin/env python3
"""Regenerate the bundled demo corpus under data/demo/.

A small template grammar emits English-like sentences whose dependency
parses are correct by construction, paired with a deterministic pseudo
translation (tokens reversed letterwise plus a vowel suffix).  Two
deliberately overlong records exercise the length filter.  The output is a
pure function of the seed: rerunning this script must not change a byte.
"""

from __future__ import annotations

import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "data" / "demo"

NOUNS = ["cat", "dog", "bird", "farmer", "child", "river", "mountain",
         "teacher", "story", "garden", "boat", "letter"]
VERBS_T = ["chased", "found", "watched", "painted", "admired", "carried"]
VERBS_I = ["slept", "laughed", "wandered", "arrived", "vanished"]
ADJS = ["small", "old", "bright", "quiet", "happy", "distant"]
PREPS = ["near", "under", "beside"]

# Each template returns (tokens, rows); rows are (head, deprel) per token,
# with head as a 1-based token id and 0 marking the root.


def t_intransitive(rng):
    n, v = rng.choice(NOUNS), rng.choice(VERBS_I)
    tokens = ["the", n, v, "."]
    rows = [(2, "det"), (3, "nsubj"), (0, "root"), (3, "punct")]
    return tokens, rows


def t_transitive(rng):
    a, n1, v, n2 = rng.choice(ADJS), rng.choice(NOUNS), rng.choice(VERBS_T), rng.choice(NOUNS)
    tokens = ["the", a, n1, v, "the", n2, "."]
    rows = [(3, "det"), (3, "amod"), (4, "nsubj"), (0, "root"),
            (6, "det"), (4, "obj"), (4, "punct")]
    return tokens, rows


def t_oblique(rng):
    n1, v, p, n2 = rng.choice(NOUNS), rng.choice(VERBS_I), rng.choice(PREPS), rng.choice(NOUNS)
    tokens = ["the", n1, v, p, "the", n2, "."]
    rows = [(2, "det"), (3, "nsubj"), (0, "root"), (6, "case"),
            (6, "det"), (3, "obl"), (3, "punct")]
    return tokens, rows


def t_nmod(rng):
    n1, n2, v = rng.choice(NOUNS), rng.choice(NOUNS), rng.choice(VERBS_I)
    tokens = ["the", n1, "of", "the", n2, v, "."]
    rows = [(2, "det"), (6, "nsubj"), (5, "case"), (5, "det"),
            (2, "nmod"), (0, "root"), (6, "punct")]
    return tokens, rows


def t_conj(rng):
    n1, n2, v = rng.choice(NOUNS), rng.choice(NOUNS), rng.choice(VERBS_I)
    tokens = ["the", n1, "and", "the", n2, v, "."]
    rows = [(2, "det"), (6, "nsubj"), (5, "cc"), (5, "det"),
            (2, "conj"), (0, "root"), (6, "punct")]
    return tokens, rows


def t_adverb(rng):
    n1, v, n2, adv = rng.choice(NOUNS), rng.choice(VERBS_T), rng.choice(NOUNS), "quickly"
    tokens = ["the", n1, v, "the", n2, adv, "."]
    rows = [(2, "det"), (3, "nsubj"), (0, "root"), (5, "det"),
            (3, "obj"), (3, "advmod"), (3, "punct")]
    return tokens, rows


def t_copula(rng):
    n, a = rng.choice(NOUNS), rng.choice(ADJS)
    tokens = ["the", n, "is", a, "."]
    rows = [(2, "det"), (4, "nsubj"), (4, "cop"), (0, "root"), (4, "punct")]
    return tokens, rows


def t_double_obl(rng):
    a, n1, v, n2, p, n3 = (rng.choice(ADJS), rng.choice(NOUNS), rng.choice(VERBS_T),
                           rng.choice(NOUNS), rng.choice(PREPS), rng.choice(NOUNS))
    tokens = ["the", a, n1, v, "the", n2, p, "the", n3, "."]
    rows = [(3, "det"), (3, "amod"), (4, "nsubj"), (0, "root"), (6, "det"),
            (4, "obj"), (9, "case"), (9, "det"), (4, "obl"), (4, "punct")]
    return tokens, rows


TEMPLATES = [t_intransitive, t_transitive, t_oblique, t_nmod,
             t_conj, t_adverb, t_copula, t_double_obl]


def t_long_conjunction(rng, conjuncts=41):
    """'the N and the N and ... V .' -- 3 * conjuncts + 1 tokens (> 120)."""
    tokens: list[str] = []
    rows: list[tuple[int, str]] = []
    verb_id = 3 * conjuncts  # position of V, 1-based
    first_noun = 2
    for i in range(conjuncts):
        noun = rng.choice(NOUNS)
        det_id = len(tokens) + 1
        noun_id = det_id + 1
        tokens += ["the", noun]
        rows.append((noun_id, "det"))
        if i == 0:
            rows.append((verb_id, "nsubj"))
        else:
            rows.append((first_noun, "conj"))
        if i < conjuncts - 1:
            tokens.append("and")
            rows.append((noun_id + 2, "cc"))
    tokens += [rng.choice(VERBS_I), "."]
    rows += [(0, "root"), (verb_id, "punct")]
    return tokens, rows


def pseudo_translate(token: str) -> str:
    if not token.isalpha():
        return token
    flipped = token[::-1].lower() + "a"
    return flipped.capitalize() if token[0].isupper() else flipped


def conllu_block(tokens, rows) -> str:
    lines = []
    for i, (form, (head, deprel)) in enumerate(zip(tokens, rows), start=1):
        lines.append(f"{i}\t{form}\t_\t_\t_\t_\t{head}\t{deprel}\t_\t_")
    return "\n".join(lines) + "\n"


def main() -> None:
    rng = random.Random(42)
    sentences = []
    for i in range(202):
        if i in (60, 150):
            tokens, rows = t_long_conjunction(rng)
        else:
            tokens, rows = rng.choice(TEMPLATES)(rng)
        sentences.append((tokens, rows))

    test_sentences = [rng.choice(TEMPLATES)(rng) for _ in range(8)]

    OUT.mkdir(parents=True, exist_ok=True)
    with open(OUT / "corpus.src", "w", encoding="utf-8") as src, \
         open(OUT / "corpus.tgt", "w", encoding="utf-8") as tgt, \
         open(OUT / "corpus.conllu", "w", encoding="utf-8") as conllu:
        for tokens, rows in sentences:
            src.write(" ".join(tokens) + "\n")
            tgt.write(" ".join(pseudo_translate(t) for t in tokens) + "\n")
            conllu.write(conllu_block(tokens, rows) + "\n")

    with open(OUT / "test.src", "w", encoding="utf-8") as src, \
         open(OUT / "test.conllu", "w", encoding="utf-8") as conllu:
        for tokens, rows in test_sentences:
            src.write(" ".join(tokens) + "\n")
            conllu.write(conllu_block(tokens, rows) + "\n")

    (OUT / "demo.cfg").write_text(
        "# Demo pipeline configuration; paths resolve relative to this file.\n"
        "corpus_source = corpus.src\n"
        "corpus_target = corpus.tgt\n"
        "corpus_conllu = corpus.conllu\n"
        "test_source = test.src\n"
        "test_conllu = test.conllu\n"
        "out_dir = out\n"
        "strategy = all\n"
        "k = 4\n"
        "pool_size = 100\n"
        "seed = 0\n"
        "source_language = English\n"
        "target_language = Novish\n",
        encoding="utf-8",
    )
    print(f"demo corpus written to {OUT}")


if __name__ == "__main__":
    main()
