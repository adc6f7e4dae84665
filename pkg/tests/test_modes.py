"""Mode declarations, canonical rule forms, and kernel generalisation."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from xhail_lite import (
    Atom,
    Constant,
    GeneralRule,
    Literal,
    ModeDecl,
    ParseError,
    Rule,
    Variable,
    aggregate_support,
    canonicalize,
    generalise,
    parse_mode_file,
)
from xhail_lite.logic import parse_rule_text, print_rule


def test_mode_file_carries_bias_examples_and_rules(flies_mode_text):
    bias, examples, rules = parse_mode_file(flies_mode_text)
    assert bias.head_decls == (
        ModeDecl(kind="head", predicate="flies", placeholders=(("+", "bird"),), negated=False),
    )
    kinds = [(d.predicate, d.negated) for d in bias.body_decls]
    assert kinds == [("penguin", False), ("penguin", True)]
    got = [(str(e.literal.atom), e.literal.negated, e.weight) for e in examples]
    assert got == [
        ("flies(a)", False, 1),
        ("flies(b)", False, 1),
        ("flies(c)", False, 1),
        ("flies(d)", True, 1),
    ]
    assert [print_rule(r) for r in rules] == [
        "bird(a).", "bird(b).", "bird(c).", "bird(d).", "penguin(d)."
    ]


def test_constant_placeholder_parses(data_dir):
    bias, _, _ = parse_mode_file((data_dir / "default.mode").read_text())
    pos = next(d for d in bias.body_decls if d.predicate == "pos")
    assert pos.placeholders == (("$", "postype"), ("+", "token"))


@pytest.mark.parametrize(
    "bad",
    [
        "#modeh split(*token).\n",
        "#frobnicate x.\n",
        "#modeh\n",
        "#example split(3)\n",  # missing period
    ],
)
def test_malformed_declarations_raise(bad):
    with pytest.raises(ParseError):
        parse_mode_file(bad)


def test_canonicalize_renames_and_sorts():
    r = parse_rule_text("p(X,Y) :- e(Y,X), f(X), not g(Y).")
    assert print_rule(canonicalize(r)) == "p(V1,V2) :- e(V2,V1), f(V1), not g(V2)."


def test_canonicalize_idempotent():
    r = canonicalize(parse_rule_text("p(X) :- a(X), b(X,Y), not c(Y)."))
    assert canonicalize(r) == r


def test_canonicalize_drops_duplicate_literals():
    r = parse_rule_text("p(X) :- q(X), q(X).")
    assert print_rule(canonicalize(r)) == "p(V1) :- q(V1)."


LITS = ["e({},{})", "f({})", "g({})", "h({},{})"]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_canonical_form_invariant_under_renaming_and_order(seed):
    rng = random.Random(seed)
    names = ["X", "Y", "Z"]
    body = []
    for _ in range(rng.randrange(1, 5)):
        pat = rng.choice(LITS)
        args = [rng.choice(names) for _ in range(pat.count("{}"))]
        body.append(("not " if rng.random() < 0.3 else "") + pat.format(*args))
    used = sorted({n for lit in body for n in names if n in lit})
    head = "p(" + ",".join(used) + ")" if used else "p(k)"
    guard = ", ".join(q + "(" + n + ")" for q, n in zip("abc", used))
    body_full = ([guard] if used else []) + body
    rule = parse_rule_text(head + " :- " + ", ".join(body_full) + ".")

    renamed = {"X": "U", "Y": "W", "Z": "Q"}
    text = print_rule(rule)
    for a, b in renamed.items():
        text = text.replace(a, b)
    shuffled = parse_rule_text(text)
    perm = list(shuffled.body)
    rng.shuffle(perm)
    shuffled = Rule(shuffled.head, tuple(perm))

    assert canonicalize(rule) == canonicalize(shuffled)


def test_generalise_lifts_inputs_keeps_constants():
    bias, _, _ = parse_mode_file(
        "#modeh split(+token).\n#modeb pos($postype,+token).\n#modeb token(+token).\n"
    )
    g = generalise(parse_rule_text("split(3) :- token(3), pos(c_VBD,3)."), bias)
    assert print_rule(g) == "split(V1) :- pos(c_VBD,V1), token(V1)."


def test_aggregate_support_groups_by_canonical_form():
    bias, _, _ = parse_mode_file(
        "#modeh split(+token).\n#modeb pos($postype,+token).\n#modeb token(+token).\n"
    )
    kernel = [
        parse_rule_text("split(3) :- token(3), pos(c_VBD,3)."),
        parse_rule_text("split(7) :- token(7), pos(c_VBD,7)."),
        parse_rule_text("split(5) :- token(5), pos(c_IN,5)."),
    ]
    general = aggregate_support(kernel, bias)
    assert sum(g.support for g in general) == len(kernel)
    by_text = {print_rule(g.rule): g for g in general}
    vbd = by_text["split(V1) :- pos(c_VBD,V1), token(V1)."]
    assert vbd.support == 2
    assert len(vbd.origin_ids) == 2
    assert by_text["split(V1) :- pos(c_IN,V1), token(V1)."].support == 1


def test_general_rule_validates_origin_count():
    r = canonicalize(parse_rule_text("p(X) :- q(X)."))
    with pytest.raises(Exception):
        GeneralRule(r, 2, (0,))
