"""Mode declarations, examples, generalisation, and rule canonicalization.

`#modeh`/`#modeb` directives fix the hypothesis language: `+type` arguments
become typed variables, `$type` arguments stay constants.  `#example`
directives state the (possibly negated) ground literals a hypothesis should
entail.  Everything else in a mode file is an ordinary rule and travels with
the examples as context.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .logic import (
    _BARE_CONST,
    _Parser,
    Atom,
    Literal,
    LogicError,
    ParseError,
    Rule,
    Term,
    Variable,
    check_safety,
    is_ground_term,
    term_key,
)

MARKER_INPUT = "+"
MARKER_CONST = "$"


class ModeError(LogicError):
    """A rule or atom does not fit the declared mode bias."""


@dataclass(frozen=True)
class ModeDecl:
    kind: str  # "head" or "body"
    predicate: str
    placeholders: tuple[tuple[str, str], ...]  # (marker, type_name)
    negated: bool = False

    @property
    def arity(self) -> int:
        return len(self.placeholders)

    @property
    def signature(self) -> tuple[str, int]:
        return (self.predicate, self.arity)

    def __str__(self) -> str:
        directive = "#modeh" if self.kind == "head" else "#modeb"
        naf = "not " if self.negated else ""
        if not self.placeholders:
            return f"{directive} {naf}{self.predicate}."
        inner = ",".join(marker + name for marker, name in self.placeholders)
        return f"{directive} {naf}{self.predicate}({inner})."


@dataclass(frozen=True)
class ModeBias:
    head_decls: tuple[ModeDecl, ...]
    body_decls: tuple[ModeDecl, ...]

    def head_decl_for(self, signature: tuple[str, int]) -> Optional[ModeDecl]:
        for decl in self.head_decls:
            if decl.signature == signature:
                return decl
        return None

    def body_decl_for(self, signature: tuple[str, int], negated: bool) -> Optional[ModeDecl]:
        for decl in self.body_decls:
            if decl.signature == signature and decl.negated == negated:
                return decl
        return None

    def plus_type_names(self) -> frozenset[str]:
        """Type names that guard `+` arguments anywhere in the bias."""
        names = set()
        for decl in self.head_decls + self.body_decls:
            for marker, type_name in decl.placeholders:
                if marker == MARKER_INPUT:
                    names.add(type_name)
        return frozenset(names)

    def head_signatures(self) -> list[tuple[str, int]]:
        return [decl.signature for decl in self.head_decls]


@dataclass(frozen=True)
class ExampleSpec:
    literal: Literal
    weight: int = 1

    def __post_init__(self):
        if not self.literal.atom.is_ground():
            raise ModeError(f"example literals must be ground: {self.literal}")
        if self.weight < 1:
            raise ModeError(f"example weight must be positive: {self.weight}")

    def __str__(self) -> str:
        return f"#example {self.literal}."


@dataclass(frozen=True)
class GeneralRule:
    rule: Rule
    support: int
    origin_ids: tuple[int, ...]

    def __post_init__(self):
        if self.support != len(self.origin_ids) or self.support < 1:
            raise ModeError(
                f"support {self.support} does not match origins {self.origin_ids}"
            )


# ---------------------------------------------------------------------------
# Mode-file parsing
# ---------------------------------------------------------------------------


def _parse_placeholder(parser: _Parser) -> tuple[str, str]:
    tok = parser.peek()
    if tok.kind != "marker":
        raise ParseError(
            f"expected '+' or '$' placeholder marker, found {tok.text!r}", tok.line, tok.col
        )
    parser.next()
    name_tok = parser.expect("name")
    if not _BARE_CONST.match(name_tok.text):
        raise ParseError(
            f"malformed placeholder type {name_tok.text!r}", name_tok.line, name_tok.col
        )
    return (tok.text, name_tok.text)


def _parse_decl(parser: _Parser, kind: str, negated: bool) -> ModeDecl:
    tok = parser.expect("name")
    if tok.text == "not":
        raise ParseError("head declarations cannot be negated", tok.line, tok.col)
    if not _BARE_CONST.match(tok.text):
        raise ParseError(f"invalid predicate name {tok.text!r}", tok.line, tok.col)
    placeholders: list[tuple[str, str]] = []
    if parser.peek().kind == "punct" and parser.peek().text == "(":
        parser.next()
        placeholders.append(_parse_placeholder(parser))
        while parser.peek().text == ",":
            parser.next()
            placeholders.append(_parse_placeholder(parser))
        parser.expect("punct", ")")
    return ModeDecl(kind, tok.text, tuple(placeholders), negated)


def parse_mode_file(text: str) -> tuple[ModeBias, list[ExampleSpec], list[Rule]]:
    """Parse directives plus ordinary rules.

    Returns the bias, the examples, and the remaining rules (the examples'
    context program, e.g. goodchunk definitions or background facts).
    """
    parser = _Parser(text)
    heads: list[ModeDecl] = []
    bodies: list[ModeDecl] = []
    examples: list[ExampleSpec] = []
    rules: list[Rule] = []
    while not parser.at_end():
        tok = parser.peek()
        if tok.kind == "directive":
            parser.next()
            if tok.text == "#modeh":
                heads.append(_parse_decl(parser, "head", negated=False))
            elif tok.text == "#modeb":
                negated = False
                nxt = parser.peek()
                if nxt.kind == "name" and nxt.text == "not":
                    parser.next()
                    negated = True
                bodies.append(_parse_decl(parser, "body", negated))
            elif tok.text == "#example":
                literal = parser.parse_literal()
                if not literal.atom.is_ground():
                    raise ParseError("example literals must be ground", tok.line, tok.col)
                examples.append(ExampleSpec(literal))
            else:
                raise ParseError(f"unknown directive {tok.text!r}", tok.line, tok.col)
            parser.expect("punct", ".")
        else:
            rule = parser.parse_rule()
            check_safety(rule)
            rules.append(rule)
    return ModeBias(tuple(heads), tuple(bodies)), examples, rules


# ---------------------------------------------------------------------------
# Canonicalization
# ---------------------------------------------------------------------------

# Beyond this body size the tie-group permutation search is skipped; kernel
# bodies stay far below it for the bundled biases.
_PERMUTE_LIMIT = 8


def _literal_sort_key(lit: Literal):
    shapes = tuple(
        (0, term_key(a)) if is_ground_term(a) else (1,) for a in lit.atom.args
    )
    return (lit.negated, lit.atom.pred, lit.atom.arity, shapes)


def _rule_variables(rule: Rule) -> set[str]:
    names: set[str] = set()
    if rule.head is not None:
        names.update(a.name for a in rule.head.args if isinstance(a, Variable))
    for lit in rule.body:
        names.update(a.name for a in lit.atom.args if isinstance(a, Variable))
    return names


def _renamed(rule: Rule) -> Rule:
    """Rename variables V1, V2, ... in first-occurrence order, head first."""
    mapping: dict[str, str] = {}

    def visit(atom: Atom) -> None:
        for a in atom.args:
            if isinstance(a, Variable) and a.name not in mapping:
                mapping[a.name] = f"V{len(mapping) + 1}"

    if rule.head is not None:
        visit(rule.head)
    for lit in rule.body:
        visit(lit.atom)

    def rewrite(atom: Atom) -> Atom:
        if not atom.args:
            return atom
        return Atom(
            atom.pred,
            tuple(
                Variable(mapping[a.name]) if isinstance(a, Variable) else a
                for a in atom.args
            ),
        )

    head = rewrite(rule.head) if rule.head is not None else None
    body = tuple(Literal(rewrite(l.atom), l.negated) for l in rule.body)
    return Rule(head, body)


def canonicalize(rule: Rule) -> Rule:
    """Normal form modulo variable renaming and body order.

    Bodies are deduplicated and sorted by (negation, predicate, arity,
    argument shapes); variables are then renamed in first-occurrence order.
    With several variables the sort can leave ties, so all permutations
    within tie groups are tried and the lexicographically smallest printed
    form wins.  Idempotent.
    """
    body: list[Literal] = []
    seen: set[Literal] = set()
    for lit in rule.body:
        if lit not in seen:
            seen.add(lit)
            body.append(lit)
    body.sort(key=_literal_sort_key)

    groups = [list(g) for _, g in itertools.groupby(body, key=_literal_sort_key)]
    ambiguous = any(len(g) > 1 for g in groups)
    if len(_rule_variables(rule)) <= 1 or not ambiguous or len(body) > _PERMUTE_LIMIT:
        return _renamed(Rule(rule.head, tuple(body)))

    best: Optional[Rule] = None
    best_text = ""
    for arrangement in itertools.product(*(itertools.permutations(g) for g in groups)):
        candidate = _renamed(
            Rule(rule.head, tuple(itertools.chain.from_iterable(arrangement)))
        )
        text = str(candidate)
        if best is None or text < best_text:
            best, best_text = candidate, text
    assert best is not None
    return best


# ---------------------------------------------------------------------------
# Generalisation
# ---------------------------------------------------------------------------


def generalise(ground_rule: Rule, bias: ModeBias) -> Rule:
    """Lift `+`-position constants to shared variables; keep `$` constants.

    Type-guard literals (unary atoms over a `+` type name) are preserved,
    with their argument lifted whenever that constant sits in some `+`
    position of the rule.  The result is canonicalized.
    """
    head = ground_rule.head
    if head is None:
        raise ModeError("cannot generalise a constraint")
    head_decl = bias.head_decl_for(head.signature)
    if head_decl is None:
        raise ModeError(f"head {head} matches no #modeh declaration")

    mapping: dict[Term, Variable] = {}

    def register(atom: Atom, decl: ModeDecl) -> None:
        for (marker, _type), arg in zip(decl.placeholders, atom.args):
            if marker == MARKER_INPUT:
                if not is_ground_term(arg):
                    raise ModeError(f"cannot generalise non-ground argument in {atom}")
                if arg not in mapping:
                    mapping[arg] = Variable(f"X{len(mapping) + 1}")

    register(head, head_decl)
    guard_types = bias.plus_type_names()
    body_decls: list[Optional[ModeDecl]] = []
    for lit in ground_rule.body:
        decl = bias.body_decl_for(lit.atom.signature, lit.negated)
        if decl is not None:
            body_decls.append(decl)
            register(lit.atom, decl)
        elif not lit.negated and lit.atom.arity == 1 and lit.atom.pred in guard_types:
            body_decls.append(None)
        else:
            raise ModeError(f"body literal {lit} matches no declaration")

    def rewrite(atom: Atom, decl: ModeDecl) -> Atom:
        args = tuple(
            mapping[arg] if marker == MARKER_INPUT else arg
            for (marker, _type), arg in zip(decl.placeholders, atom.args)
        )
        return Atom(atom.pred, args)

    new_head = rewrite(head, head_decl)
    new_body: list[Literal] = []
    for lit, decl in zip(ground_rule.body, body_decls):
        if decl is None:
            arg = lit.atom.args[0]
            lifted = mapping.get(arg, arg)
            new_body.append(Literal(Atom(lit.atom.pred, (lifted,)), lit.negated))
        else:
            new_body.append(Literal(rewrite(lit.atom, decl), lit.negated))
    return canonicalize(Rule(new_head, tuple(new_body)))


def aggregate_support(ground_kernel: Sequence[Rule], bias: ModeBias) -> list[GeneralRule]:
    """Group ground kernel rules by their canonical generalisation."""
    groups: dict[Rule, list[int]] = {}
    for idx, ground in enumerate(ground_kernel):
        lifted = generalise(ground, bias)
        groups.setdefault(lifted, []).append(idx)
    ordered = sorted(groups.items(), key=lambda kv: str(kv[0]))
    return [GeneralRule(rule, len(ids), tuple(ids)) for rule, ids in ordered]
