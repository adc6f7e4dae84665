"""Corpus loading, the fact encoding of sentences, and chunk prediction."""

import pytest

from xhail_lite import (
    Atom,
    Chunking,
    Constant,
    CorpusError,
    FactBase,
    Sentence,
    Token,
    chunking_text,
    corpus_problem,
    load_corpus,
    load_tokens,
    make_examples,
    mangle_tag,
    parse_program,
    predict,
    sentence_facts,
    sentence_facts_text,
)
from xhail_lite.chunking import BACKGROUND
from xhail_lite.logic import parse_atom_text, print_rule


@pytest.mark.parametrize(
    "tag, expected",
    [
        (".", "c_p"),
        ("?", "c_p"),
        ("!", "c_p"),
        (",", "c_c"),
        (";", "c_c"),
        (":", "c_c"),
        ("NN", "c_NN"),
        ("VBD", "c_VBD"),
        ("PRP$", "c_PRPd"),
        ("-LRB-", "c_mLRBm"),
        ("``", "c_tt"),
        ("''", "c_qq"),
        ("#", "c_n"),
        ("WP$", "c_WPd"),
    ],
)
def test_tag_mangling(tag, expected):
    assert mangle_tag(tag) == expected


def test_headline_fixture_loads(headline):
    s, gold = headline
    assert s.id == "headline-001"
    assert len(s.tokens) == 9
    assert s.tokens[0] == Token(1, "Former", "NNP", 2, "NAME")
    assert s.tokens[6] == Token(7, "dead", "VBD", 0, "ROOT")
    assert gold.chunks == ((1, 6), (7, 7), (8, 9))


def test_headline_fact_encoding_text(headline):
    s, _ = headline
    text = sentence_facts_text(s)
    lines = text.splitlines()
    assert lines[0] == 'pos(c_NNP,1). head(2,1). form(1,"Former"). rel(c_NAME,1).'
    assert lines[6] == 'pos(c_VBD,7). head(root,7). form(7,"dead"). rel(c_ROOT,7).'
    assert "nextpos(c_IN,7)." in lines
    assert "postype(c_VBD)." in lines
    assert "token(9)." in lines
    assert "nextpos(c_CD,9)." not in text


def test_sentence_facts_membership_and_counts(headline):
    s, _ = headline
    fb = sentence_facts(s)
    n = len(s.tokens)
    tags = {t.pos_tag for t in s.tokens}
    assert len(fb.with_signature("pos", 2)) == n
    assert len(fb.with_signature("form", 2)) == n
    assert len(fb.with_signature("head", 2)) == n
    assert len(fb.with_signature("rel", 2)) == n
    assert len(fb.with_signature("token", 1)) == n
    assert len(fb.with_signature("nextpos", 2)) == n - 1
    assert len(fb.with_signature("postype", 1)) == len(tags)
    assert parse_atom_text("head(root,7)") in fb
    assert parse_atom_text('form(6,"Demjanjuk")') in fb


def test_sentence_facts_offset_shifts_indices(headline):
    s, _ = headline
    fb = sentence_facts(s, offset=100)
    assert parse_atom_text("token(101)") in fb
    assert parse_atom_text("token(1)") not in fb
    assert parse_atom_text("nextpos(c_IN,107)") in fb
    assert parse_atom_text("head(root,107)") in fb
    assert parse_atom_text("head(102,101)") in fb


def test_background_rules_lift_pos_facts():
    from xhail_lite import evaluate

    model = evaluate(list(BACKGROUND) + parse_program("pos(c_NN,4)."), FactBase())
    assert parse_atom_text("postype(c_NN)") in model
    assert parse_atom_text("token(4)") in model


def test_gold_chunk_examples_follow_boundary_shape(headline):
    s, gold = headline
    rules, examples = make_examples(gold)
    assert [print_rule(r) for r in rules] == [
        "goodchunk(1) :- not split(1), not split(2), not split(3), not split(4), not split(5), split(6).",
        "goodchunk(7) :- split(6), split(7).",
        "goodchunk(8) :- split(7), not split(8).",
    ]
    assert [(str(e.literal.atom), e.literal.negated, e.weight) for e in examples] == [
        ("goodchunk(1)", False, 1),
        ("goodchunk(7)", False, 1),
        ("goodchunk(8)", False, 1),
    ]


def test_corpus_problem_offsets_are_contiguous(data_dir):
    corpus = load_corpus(str(data_dir / "toy6.tokens"), str(data_dir / "toy6.gold"))
    rules, examples = corpus_problem(corpus)
    token_atoms = sorted(
        r.head.args[0] for r in rules if r.head.pred == "token" and not r.body
    )
    total = sum(len(s.tokens) for s, _ in corpus)
    assert token_atoms == list(range(1, total + 1))
    heads = [e.literal.atom for e in examples]
    assert len(set(heads)) == len(heads)


def test_predict_with_empty_hypothesis_is_one_chunk(headline):
    s, _ = headline
    assert predict([], s).chunks == ((1, 9),)


def test_predict_matches_gold_when_splits_derived(headline):
    s, gold = headline
    hyp = parse_program("split(X) :- nextpos(c_VBD,X).\nsplit(X) :- pos(c_VBD,X).")
    assert predict(hyp, s) == gold


def test_split_at_last_token_changes_nothing(headline):
    s, _ = headline
    hyp = parse_program("split(X) :- pos(c_CD,X).")  # only token 9 matches
    assert predict(hyp, s).chunks == ((1, 9),)


def test_predict_all_splits_gives_singletons(headline):
    s, _ = headline
    hyp = parse_program("split(X) :- token(X).")
    assert predict(hyp, s).chunks == tuple((i, i) for i in range(1, 10))


def test_chunking_text_round_trips_through_loader(tmp_path, headline):
    s, gold = headline
    tokens_src = (
        "\n".join(
            f"{s.id}\t{t.index}\t{t.surface}\t{t.pos_tag}\t{t.head}:{t.rel}"
            for t in s.tokens
        )
        + "\n"
    )
    (tmp_path / "one.tokens").write_text(tokens_src)
    (tmp_path / "one.gold").write_text(chunking_text(gold, s) + "\n")
    reloaded = load_corpus(str(tmp_path / "one.tokens"), str(tmp_path / "one.gold"))
    assert reloaded[0][1].chunks == gold.chunks


def test_chunk_coverage_gap_is_rejected():
    with pytest.raises(CorpusError) as exc:
        Chunking("s1", ((1, 2), (4, 5)))
    assert "coverage gap at token 3" in str(exc.value)
    assert "s1" in str(exc.value)


def test_chunk_overlap_is_rejected():
    with pytest.raises(CorpusError):
        Chunking("s1", ((1, 3), (3, 4)))


def test_gold_surface_mismatch_names_the_sentence(tmp_path, data_dir):
    tokens = (data_dir / "headline.tokens").read_text()
    (tmp_path / "bad.tokens").write_text(tokens)
    (tmp_path / "bad.gold").write_text("[ Wrong words here ]\n")
    with pytest.raises(CorpusError):
        load_corpus(str(tmp_path / "bad.tokens"), str(tmp_path / "bad.gold"))


def test_sentence_count_mismatch_is_rejected(tmp_path, data_dir):
    tokens = (data_dir / "headline.tokens").read_text()
    gold = (data_dir / "headline.gold").read_text()
    (tmp_path / "a.tokens").write_text(tokens)
    (tmp_path / "a.gold").write_text(gold + gold)
    with pytest.raises(CorpusError):
        load_corpus(str(tmp_path / "a.tokens"), str(tmp_path / "a.gold"))


def test_malformed_token_row_is_rejected(tmp_path):
    (tmp_path / "bad.tokens").write_text("s1\t1\tword\n")
    with pytest.raises(CorpusError):
        load_tokens(str(tmp_path / "bad.tokens"))


def test_token_indices_must_be_sequential(tmp_path):
    (tmp_path / "bad.tokens").write_text(
        "s1\t1\ta\tNN\t0:ROOT\ns1\t3\tb\tNN\t1:NMOD\n"
    )
    with pytest.raises(CorpusError):
        load_tokens(str(tmp_path / "bad.tokens"))


def test_load_tokens_splits_on_blank_lines(data_dir):
    sentences = load_tokens(str(data_dir / "toy6.tokens"))
    assert len(sentences) == 6
    assert all(s.tokens[0].index == 1 for s in sentences)
    assert len({s.id for s in sentences}) == 6
