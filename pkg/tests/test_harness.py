"""Scoring, the paired t-test, and the cross-validation driver."""

import difflib
import json
import math
from random import Random

import pytest
import scipy.special
import scipy.stats
from hypothesis import given, settings, strategies as st

from xhail_lite import (
    Chunking,
    DEFAULT_MODE,
    Sentence,
    Token,
    corpus_score,
    cross_validate,
    load_corpus,
    match_count,
    paired_t_test_one_tailed,
    parse_program,
    report_dict,
    score,
    score_corpus,
)
from xhail_lite.harness import chunk_strings, regularized_incomplete_beta


def mk_sentence(words, sid="s"):
    toks = tuple(
        Token(i + 1, w, "NN", 0 if i == 0 else 1, "ROOT" if i == 0 else "NMOD")
        for i, w in enumerate(words)
    )
    return Sentence(sid, toks)


def chunks_from_sizes(sizes, sid="s"):
    spans = []
    lo = 1
    for n in sizes:
        spans.append((lo, lo + n - 1))
        lo += n
    return Chunking(sid, tuple(spans))


# ---------------------------------------------------------------------------
# match_count


def test_match_count_identical_sequences():
    assert match_count(["a b", "c", "d e"], ["a b", "c", "d e"]) == 3


def test_match_count_single_matching_block():
    assert match_count(["A", "B"], ["A", "C"]) == 1


def test_match_count_longest_block_wins():
    assert match_count(["X", "A", "B"], ["A", "B", "Y"]) == 2


def test_match_count_empty_sides():
    assert match_count([], ["A"]) == 0
    assert match_count(["A"], []) == 0


def difflib_matches(a, b):
    sm = difflib.SequenceMatcher(a=a, b=b, autojunk=False)
    return sum(block.size for block in sm.get_matching_blocks())


CHUNK_ALPHABET = ["a", "b", "c", "a b", "b c", "d"]


@settings(max_examples=300, deadline=None)
@given(
    st.lists(st.sampled_from(CHUNK_ALPHABET), max_size=8),
    st.lists(st.sampled_from(CHUNK_ALPHABET), max_size=8),
)
def test_match_count_against_slow_reference(a, b):
    from oracles import slow_match_count

    got = match_count(a, b)
    assert got == slow_match_count(a, b)
    assert got == match_count(b, a)
    assert got <= min(len(a), len(b))
    # the first-found tie convention of difflib can only lose matches
    assert got >= difflib_matches(a, b)


# ---------------------------------------------------------------------------
# score


def test_perfect_prediction_scores_ones():
    s = mk_sentence(["w1", "w2", "w3"])
    gold = chunks_from_sizes([2, 1])
    assert score(gold, gold, s) == (1.0, 1.0, 1.0)


def test_partial_match_score():
    s = mk_sentence(["w1", "w2", "w3", "w4", "w5"])
    gold = chunks_from_sizes([2, 2, 1])
    pred = chunks_from_sizes([2, 1, 1, 1])
    # shared chunk strings: "w1 w2" and "w5"
    triple = score(pred, gold, s)
    assert triple.precision == pytest.approx(0.5)
    assert triple.recall == pytest.approx(2 / 3)
    assert triple.f1 == pytest.approx(4 / 7)


def test_disjoint_chunkings_score_zero():
    s = mk_sentence(["w1", "w2", "w3"])
    gold = chunks_from_sizes([2, 1])
    pred = chunks_from_sizes([3])
    assert score(pred, gold, s) == (0.0, 0.0, 0.0)


def test_f1_between_p_and_r():
    rng = Random(5)
    for _ in range(200):
        n = rng.randrange(2, 9)
        s = mk_sentence([f"w{i}" for i in range(n)])

        def random_chunks():
            sizes = []
            left = n
            while left:
                take = rng.randrange(1, left + 1)
                sizes.append(take)
                left -= take
            return chunks_from_sizes(sizes)

        pred, gold = random_chunks(), random_chunks()
        p, r, f1 = score(pred, gold, s)
        m = match_count(chunk_strings(pred, s), chunk_strings(gold, s))
        assert p == m / len(pred.chunks)
        assert r == m / len(gold.chunks)
        if p + r:
            assert f1 == pytest.approx(2 * p * r / (p + r))
            assert min(p, r) - 1e-12 <= f1 <= max(p, r) + 1e-12
        else:
            assert f1 == 0.0


def test_corpus_score_is_plain_mean():
    triples = [
        score(chunks_from_sizes([1, 1]), chunks_from_sizes([2]), mk_sentence(["a", "b"])),
        score(chunks_from_sizes([2]), chunks_from_sizes([2]), mk_sentence(["a", "b"])),
    ]
    agg = corpus_score(triples)
    assert agg.precision == pytest.approx(sum(t.precision for t in triples) / 2)
    assert agg.f1 == pytest.approx(sum(t.f1 for t in triples) / 2)


def test_score_corpus_with_true_rules_is_perfect(data_dir):
    corpus = load_corpus(str(data_dir / "toy6.tokens"), str(data_dir / "toy6.gold"))
    hyp = parse_program("split(X) :- pos(c_VBD,X).\nsplit(X) :- nextpos(c_IN,X).")
    assert score_corpus(hyp, corpus) == (1.0, 1.0, 1.0)


# ---------------------------------------------------------------------------
# t-test


def test_identical_vectors_give_half():
    res = paired_t_test_one_tailed([0.5, 0.6, 0.7], [0.5, 0.6, 0.7])
    assert res.t == 0.0
    assert res.p == 0.5
    assert not res.degenerate


def test_frozen_reference_values():
    d = [0.02, 0.01, 0.03, 0.02, 0.02]
    a = [0.9 + x for x in d]
    b = [0.9] * 5
    res = paired_t_test_one_tailed(a, b)
    assert res.t == pytest.approx(6.324555320336759, abs=1e-9)
    assert res.p == pytest.approx(0.0015991010761676528, abs=1e-9)


def test_against_live_scipy():
    rng = Random(11)
    for _ in range(25):
        n = rng.randrange(3, 12)
        a = [rng.random() for _ in range(n)]
        b = [rng.random() for _ in range(n)]
        if len({x - y for x, y in zip(a, b)}) == 1:
            continue
        res = paired_t_test_one_tailed(a, b)
        t, p = scipy.stats.ttest_rel(a, b, alternative="greater")
        assert res.t == pytest.approx(float(t), abs=1e-9)
        assert res.p == pytest.approx(float(p), abs=1e-9)


def test_zero_variance_conventions():
    up = paired_t_test_one_tailed([1.0, 1.0, 1.0], [0.5, 0.5, 0.5])
    assert up.degenerate and up.p == 0.0 and up.t == math.inf
    down = paired_t_test_one_tailed([0.5, 0.5, 0.5], [1.0, 1.0, 1.0])
    assert down.degenerate and down.p == 1.0 and down.t == -math.inf


def test_translation_invariance():
    a = [0.91, 0.90, 0.93, 0.89]
    b = [0.88, 0.91, 0.90, 0.87]
    base = paired_t_test_one_tailed(a, b)
    shifted = paired_t_test_one_tailed([x + 0.137 for x in a], [x + 0.137 for x in b])
    assert abs(base.t - shifted.t) <= 1e-12
    assert abs(base.p - shifted.p) <= 1e-12


def test_short_vectors_rejected():
    with pytest.raises(ValueError):
        paired_t_test_one_tailed([1.0], [0.5])
    with pytest.raises(ValueError):
        paired_t_test_one_tailed([1.0, 2.0], [0.5])


def test_incomplete_beta_against_scipy():
    rng = Random(3)
    for _ in range(200):
        a = rng.uniform(0.2, 20)
        b = rng.uniform(0.2, 20)
        x = rng.random()
        want = float(scipy.special.betainc(a, b, x))
        assert regularized_incomplete_beta(a, b, x) == pytest.approx(want, abs=1e-12)
    assert regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0
    assert regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0


# ---------------------------------------------------------------------------
# cross-validation


@pytest.fixture(scope="module")
def toy20(data_dir):
    return load_corpus(str(data_dir / "toy20.tokens"), str(data_dir / "toy20.gold"))


def test_folds_partition_the_corpus(toy20):
    folds, summary = cross_validate(toy20, 4, budget_s=30)
    assert len(folds) == 4
    all_ids = [s.id for s, _ in toy20]
    seen_test = []
    for i, fr in enumerate(folds):
        assert fr.fold_index == i
        assert len(fr.train_ids) == 15
        assert len(fr.test_ids) == 5
        assert set(fr.train_ids) | set(fr.test_ids) == set(all_ids)
        assert not set(fr.train_ids) & set(fr.test_ids)
        seen_test.extend(fr.test_ids)
    assert sorted(seen_test) == sorted(all_ids)
    f1s = [fr.cv_score.f1 for fr in folds]
    mean = sum(f1s) / len(f1s)
    assert summary.cv_f1_mean == pytest.approx(mean)
    var = sum((x - mean) ** 2 for x in f1s) / (len(f1s) - 1)
    assert summary.cv_f1_std == pytest.approx(math.sqrt(var))


def test_contiguous_fold_blocks(toy20):
    folds, _ = cross_validate(toy20, 4, budget_s=30)
    ids = [s.id for s, _ in toy20]
    assert folds[0].test_ids == ids[0:5]
    assert folds[3].test_ids == ids[15:20]


def test_shuffle_seed_permutes_but_still_partitions(toy20):
    folds, _ = cross_validate(toy20, 4, budget_s=30, shuffle_seed=99)
    ids = [s.id for s, _ in toy20]
    assert folds[0].test_ids != ids[0:5]
    seen = [tid for fr in folds for tid in fr.test_ids]
    assert sorted(seen) == sorted(ids)


def test_indivisible_corpus_is_rejected(toy20):
    with pytest.raises(ValueError) as exc:
        cross_validate(toy20, 3)
    assert "divisible" in str(exc.value)
    assert "truncate" in str(exc.value)


def test_fewer_than_two_folds_rejected(toy20):
    with pytest.raises(ValueError):
        cross_validate(toy20, 1)


def test_report_schema(toy20):
    folds, summary = cross_validate(toy20, 4, budget_s=30)
    rep = report_dict(folds, summary, pr=0, budget_s=30, elapsed_s=1.5)
    assert set(rep) == {"folds", "summary", "elapsed_s"}
    assert set(rep["summary"]) == {"cv_f1", "test_f1"}
    assert rep["summary"]["test_f1"] is None
    fold = rep["folds"][0]
    assert set(fold) == {"fold", "pr", "budget_s", "so", "cv", "test", "hypothesis"}
    assert set(fold["cv"]) == {"p", "r", "f1"}
    assert fold["test"] is None
    assert all(isinstance(rt, str) for rt in fold["hypothesis"])
    json.dumps(rep)  # must be serialisable as-is
