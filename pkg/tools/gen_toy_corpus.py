#!/usr/bin/env python3
"""Generate the bundled toy chunking corpora.

Sentences are random tag sequences over a small vocabulary; gold chunkings
come from two ground-truth rules: a chunk ends at every past-tense verb, and
before every preposition.  Regenerating with the same seeds reproduces the
committed files byte for byte.
"""

from __future__ import annotations

import argparse
import os
from random import Random

WORDS = {
    "NNP": ["Demjanjuk", "Europe", "Nadal", "Boeing", "Intel", "Obama", "Vienna"],
    "NN": ["guard", "camp", "death", "market", "deal", "plant", "strike"],
    "DT": ["the", "a", "this"],
    "JJ": ["former", "new", "big", "late"],
    "VBD": ["died", "fell", "rose", "won", "said"],
    "IN": ["at", "in", "on", "after"],
    "CD": ["91", "2008", "50", "7"],
}
TAGS = sorted(WORDS)

CORPORA = [
    ("toy110", 110, 110),
    ("toy20", 20, 20),
    ("toy6", 6, 6),
    ("toytest11", 11, 211),
]


def make_sentence(rng: Random, sid: str) -> tuple[list[tuple[str, str]], list[int]]:
    n = rng.randrange(5, 13)
    tags = [rng.choice(TAGS) for _ in range(n)]
    tokens = [(rng.choice(WORDS[t]), t) for t in tags]
    splits = [
        i
        for i in range(1, n)  # 1-based boundary positions, never n itself
        if tags[i - 1] == "VBD" or tags[i] == "IN"
    ]
    return tokens, splits


def chunks_of(n: int, splits: list[int]) -> list[tuple[int, int]]:
    out = []
    lo = 1
    for boundary in splits:
        out.append((lo, boundary))
        lo = boundary + 1
    out.append((lo, n))
    return out


def emit(name: str, count: int, seed: int, outdir: str) -> None:
    rng = Random(seed)
    token_lines: list[str] = []
    gold_lines: list[str] = []
    for k in range(1, count + 1):
        sid = f"{name}-{k:03d}"
        tokens, splits = make_sentence(rng, sid)
        for i, (surface, tag) in enumerate(tokens, start=1):
            head = i - 1
            rel = "ROOT" if head == 0 else "NMOD"
            token_lines.append(f"{sid}\t{i}\t{surface}\t{tag}\t{head}:{rel}")
        token_lines.append("")
        parts: list[str] = []
        for lo, hi in chunks_of(len(tokens), splits):
            parts.append("[")
            parts.extend(surface for surface, _tag in tokens[lo - 1 : hi])
            parts.append("]")
        gold_lines.append(" ".join(parts))
    with open(os.path.join(outdir, f"{name}.tokens"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(token_lines) + "\n")
    with open(os.path.join(outdir, f"{name}.gold"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(gold_lines) + "\n")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    default_dir = os.path.join(os.path.dirname(__file__), "..", "data")
    parser.add_argument("--outdir", default=os.path.normpath(default_dir))
    args = parser.parse_args()
    os.makedirs(args.outdir, exist_ok=True)
    for name, count, seed in CORPORA:
        emit(name, count, seed, args.outdir)
        print(f"wrote {name}: {count} sentences")


if __name__ == "__main__":
    main()
