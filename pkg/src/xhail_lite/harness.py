"""Evaluation: chunk-level P/R/F1, k-fold cross-validation, paired t-test.

Chunkings are compared as sequences of chunk strings via longest-matching-
block alignment; corpus scores are unweighted means of per-sentence scores.
Cross-validation folds are contiguous blocks in file order unless a shuffle
seed is given.  The t-test tail probability is computed from the regularized
incomplete beta function, accurate to well below 1e-9.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from random import Random
from typing import Callable, NamedTuple, Optional, Sequence

from .chunking import Chunking, DEFAULT_MODE, Sentence, corpus_problem, predict
from .logic import Rule
from .modes import parse_mode_file
from .pipeline import DEFAULT_BUDGET_S, LearnResult, learn

Corpus = Sequence[tuple[Sentence, Chunking]]


class ScoreTriple(NamedTuple):
    precision: float
    recall: float
    f1: float


class TTestResult(NamedTuple):
    t: float
    p: float
    degenerate: bool = False


@dataclass
class FoldResult:
    fold_index: int
    hypothesis: tuple[Rule, ...]
    train_ids: list[str]
    test_ids: list[str]
    cv_score: ScoreTriple
    test_score: Optional[ScoreTriple]
    so: float


class XvalSummary(NamedTuple):
    cv_f1_mean: float
    cv_f1_std: float
    test_f1_mean: Optional[float]
    test_f1_std: Optional[float]


# ---------------------------------------------------------------------------
# Alignment and scoring
# ---------------------------------------------------------------------------


def _longest_blocks(
    a: Sequence[str], alo: int, ahi: int, b: Sequence[str], blo: int, bhi: int
) -> list[tuple[int, int, int]]:
    """Every (i, j, size) with maximal size where a[i:i+size] == b[j:j+size]."""
    best = 0
    spots: list[tuple[int, int, int]] = []
    ends: dict[int, int] = {}  # j -> match length ending at (i, j)
    for i in range(alo, ahi):
        row: dict[int, int] = {}
        for j in range(blo, bhi):
            if a[i] == b[j]:
                size = ends.get(j - 1, 0) + 1
                row[j] = size
                if size > best:
                    best = size
                    spots = [(i - size + 1, j - size + 1, size)]
                elif size == best:
                    spots.append((i - size + 1, j - size + 1, size))
        ends = row
    return spots


def match_count(pred: Sequence[str], gold: Sequence[str]) -> int:
    """Total size of matching blocks: longest block, then recurse both sides.

    Ties between equally long blocks are resolved toward the largest total,
    which makes the count independent of argument order.
    """
    a, b = list(pred), list(gold)
    memo: dict[tuple[int, int, int, int], int] = {}

    def walk(alo: int, ahi: int, blo: int, bhi: int) -> int:
        if alo >= ahi or blo >= bhi:
            return 0
        key = (alo, ahi, blo, bhi)
        got = memo.get(key)
        if got is None:
            got = 0
            for i, j, size in _longest_blocks(a, alo, ahi, b, blo, bhi):
                total = size + walk(alo, i, blo, j) + walk(i + size, ahi, j + size, bhi)
                if total > got:
                    got = total
            memo[key] = got
        return got

    return walk(0, len(a), 0, len(b))


def chunk_strings(c: Chunking, s: Sentence) -> list[str]:
    return [
        " ".join(s.tokens[i - 1].surface for i in range(lo, hi + 1))
        for lo, hi in c.chunks
    ]


def score(pred: Chunking, gold: Chunking, s: Sentence) -> ScoreTriple:
    pred_strings = chunk_strings(pred, s)
    gold_strings = chunk_strings(gold, s)
    matched = match_count(pred_strings, gold_strings)
    precision = matched / len(pred_strings) if pred_strings else 0.0
    recall = matched / len(gold_strings) if gold_strings else 0.0
    if precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    else:
        f1 = 0.0
    return ScoreTriple(precision, recall, f1)


def corpus_score(scores: Sequence[ScoreTriple]) -> ScoreTriple:
    """Corpus aggregation: the unweighted mean of each per-sentence metric."""
    if not scores:
        return ScoreTriple(0.0, 0.0, 0.0)
    n = len(scores)
    return ScoreTriple(
        math.fsum(s.precision for s in scores) / n,
        math.fsum(s.recall for s in scores) / n,
        math.fsum(s.f1 for s in scores) / n,
    )


def score_corpus(hypothesis: Sequence[Rule], corpus: Corpus) -> ScoreTriple:
    return corpus_score(
        [score(predict(hypothesis, s), gold, s) for s, gold in corpus]
    )


# ---------------------------------------------------------------------------
# Paired one-tailed t-test
# ---------------------------------------------------------------------------


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    """Modified Lentz evaluation of the incomplete-beta continued fraction."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 300):
        m2 = 2 * m
        coeff = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + coeff * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + coeff / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        coeff = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + coeff * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + coeff / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        step = d * c
        h *= step
        if abs(step - 1.0) < 3e-14:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0,1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_beta = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    front = math.exp(a * math.log(x) + b * math.log1p(-x) - ln_beta)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, 1.0 - x) / b


def paired_t_test_one_tailed(
    a: Sequence[float], b: Sequence[float]
) -> TTestResult:
    """Test H1: mean(a) > mean(b) on paired samples; upper-tail p."""
    if len(a) != len(b):
        raise ValueError(f"paired samples differ in length: {len(a)} vs {len(b)}")
    n = len(a)
    if n < 2:
        raise ValueError("paired t-test needs at least 2 pairs")
    diffs = [x - y for x, y in zip(a, b)]
    mean = math.fsum(diffs) / n
    variance = math.fsum((d - mean) ** 2 for d in diffs) / (n - 1)
    if variance == 0.0:
        if mean == 0.0:
            return TTestResult(0.0, 0.5)
        if mean > 0.0:
            return TTestResult(math.inf, 0.0, degenerate=True)
        return TTestResult(-math.inf, 1.0, degenerate=True)
    t = mean / math.sqrt(variance / n)
    nu = n - 1
    upper_half = 0.5 * regularized_incomplete_beta(
        nu / 2.0, 0.5, nu / (nu + t * t)
    )
    p = upper_half if t >= 0 else 1.0 - upper_half
    return TTestResult(t, p)


# ---------------------------------------------------------------------------
# Cross-validation
# ---------------------------------------------------------------------------


def _worker_count() -> int:
    raw = os.environ.get("XHAIL_LITE_THREADS", "").strip()
    if not raw:
        return 1
    try:
        count = int(raw)
    except ValueError:
        raise ValueError(f"XHAIL_LITE_THREADS must be an integer, got {raw!r}") from None
    return max(count, 1)


def cross_validate(
    corpus: Corpus,
    k: int,
    pr: int = 0,
    budget_s: float = DEFAULT_BUDGET_S,
    test_corpus: Optional[Corpus] = None,
    mode_text: str = DEFAULT_MODE,
    shuffle_seed: Optional[int] = None,
    on_improve: Optional[Callable[[int, float, int, int], None]] = None,
) -> tuple[list[FoldResult], XvalSummary]:
    """Contiguous k-fold protocol: fold i tests on block i, trains on the rest."""
    if k < 2:
        raise ValueError(f"cross-validation needs at least 2 folds, got {k}")
    n = len(corpus)
    if n % k != 0:
        raise ValueError(
            f"corpus size {n} is not divisible by {k} folds; "
            f"truncate the corpus to {n - n % k} sentences or pick another k"
        )
    ordered = list(corpus)
    if shuffle_seed is not None:
        Random(shuffle_seed).shuffle(ordered)
    bias, _examples, mode_rules = parse_mode_file(mode_text)
    size = n // k

    def run_fold(i: int) -> FoldResult:
        test_block = ordered[i * size : (i + 1) * size]
        train_block = ordered[: i * size] + ordered[(i + 1) * size :]
        context, examples = corpus_problem(train_block)
        fold_improve = None
        if on_improve is not None:
            fold_improve = lambda e, u, l, _i=i: on_improve(_i, e, u, l)
        result: LearnResult = learn(
            mode_rules, examples, context, bias, pr=pr, budget_s=budget_s,
            on_improve=fold_improve,
        )
        hypothesis = result.induction.hypothesis.rules
        return FoldResult(
            fold_index=i,
            hypothesis=hypothesis,
            train_ids=[s.id for s, _c in train_block],
            test_ids=[s.id for s, _c in test_block],
            cv_score=score_corpus(hypothesis, test_block),
            test_score=(
                score_corpus(hypothesis, test_corpus)
                if test_corpus is not None
                else None
            ),
            so=result.induction.so,
        )

    workers = _worker_count()
    if workers == 1:
        folds = [run_fold(i) for i in range(k)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            folds = list(pool.map(run_fold, range(k)))

    cv_f1 = [f.cv_score.f1 for f in folds]
    summary = XvalSummary(
        cv_f1_mean=_mean(cv_f1),
        cv_f1_std=_sample_std(cv_f1),
        test_f1_mean=(
            _mean([f.test_score.f1 for f in folds]) if test_corpus is not None else None
        ),
        test_f1_std=(
            _sample_std([f.test_score.f1 for f in folds])
            if test_corpus is not None
            else None
        ),
    )
    return folds, summary


def _mean(values: Sequence[float]) -> float:
    return math.fsum(values) / len(values)


def _sample_std(values: Sequence[float]) -> float:
    m = _mean(values)
    return math.sqrt(math.fsum((v - m) ** 2 for v in values) / (len(values) - 1))


def report_dict(
    folds: Sequence[FoldResult],
    summary: XvalSummary,
    pr: int,
    budget_s: float,
    elapsed_s: float,
) -> dict:
    """The frozen run-report schema; serialise with json.dumps(..., indent=2)."""

    def triple(s: Optional[ScoreTriple]) -> Optional[dict]:
        if s is None:
            return None
        return {"p": s.precision, "r": s.recall, "f1": s.f1}

    return {
        "folds": [
            {
                "fold": f.fold_index,
                "pr": pr,
                "budget_s": budget_s,
                "so": f.so,
                "cv": triple(f.cv_score),
                "test": triple(f.test_score),
                "hypothesis": [str(r) for r in f.hypothesis],
            }
            for f in folds
        ],
        "summary": {
            "cv_f1": {"mean": summary.cv_f1_mean, "std": summary.cv_f1_std},
            "test_f1": (
                {"mean": summary.test_f1_mean, "std": summary.test_f1_std}
                if summary.test_f1_mean is not None
                else None
            ),
        },
        "elapsed_s": elapsed_s,
    }
