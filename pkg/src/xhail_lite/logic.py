"""Syntax of the rule language: terms, atoms, NAF literals, rules, fact bases.

The language is function-free: terms are lowercase constants, quoted-string
constants, integers, uppercase variables, and the anonymous placeholder ``_``.
Rules are written ``head :- b1, ..., not bk.`` and facts as ``head.``;
``%`` starts a line comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union


class LogicError(Exception):
    """Base class for errors raised by the rule-language layer."""


class ParseError(LogicError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


class UnsafeRuleError(LogicError):
    """A head or NAF variable has no positive body occurrence."""

    def __init__(self, rule_text: str, variable: str):
        super().__init__(f"unsafe variable {variable} in rule: {rule_text}")
        self.variable = variable


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

_BARE_CONST = re.compile(r"[a-z][A-Za-z0-9_]*\Z")
_VAR_NAME = re.compile(r"[A-Z][A-Za-z0-9_]*\Z")


@dataclass(frozen=True, slots=True)
class Constant:
    symbol: str

    def __str__(self) -> str:
        if _BARE_CONST.match(self.symbol):
            return self.symbol
        escaped = self.symbol.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'


@dataclass(frozen=True, slots=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Anonymous:
    def __str__(self) -> str:
        return "_"


ANON = Anonymous()

# Integers are represented by plain Python ints.
Term = Union[Constant, Variable, Anonymous, int]


def term_str(t: Term) -> str:
    return str(t)


def term_key(t: Term):
    """Total order over terms: symbolic constants, integers, variables, ``_``."""
    if isinstance(t, Constant):
        return (0, t.symbol, 0)
    if isinstance(t, int):
        return (1, "", t)
    if isinstance(t, Variable):
        return (2, t.name, 0)
    return (3, "", 0)


def is_ground_term(t: Term) -> bool:
    return isinstance(t, (Constant, int))


# ---------------------------------------------------------------------------
# Atoms, literals, rules
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Atom:
    pred: str
    args: tuple[Term, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def signature(self) -> tuple[str, int]:
        return (self.pred, len(self.args))

    def is_ground(self) -> bool:
        return all(is_ground_term(a) for a in self.args)

    def key(self):
        return (self.pred, len(self.args), tuple(term_key(a) for a in self.args))

    def __str__(self) -> str:
        if not self.args:
            return self.pred
        return "%s(%s)" % (self.pred, ",".join(term_str(a) for a in self.args))


@dataclass(frozen=True, slots=True)
class Literal:
    atom: Atom
    negated: bool = False

    def __str__(self) -> str:
        return ("not " if self.negated else "") + str(self.atom)


@dataclass(frozen=True, slots=True)
class Rule:
    head: Optional[Atom]
    body: tuple[Literal, ...] = ()

    def is_fact(self) -> bool:
        return self.head is not None and not self.body

    def is_constraint(self) -> bool:
        return self.head is None

    def variables(self) -> set[str]:
        out: set[str] = set()
        if self.head is not None:
            out.update(a.name for a in self.head.args if isinstance(a, Variable))
        for lit in self.body:
            out.update(a.name for a in lit.atom.args if isinstance(a, Variable))
        return out

    def __str__(self) -> str:
        if self.head is None:
            return ":- " + ", ".join(str(l) for l in self.body) + "."
        if not self.body:
            return str(self.head) + "."
        return "%s :- %s." % (self.head, ", ".join(str(l) for l in self.body))


def print_rule(rule: Rule) -> str:
    """Render a rule as parseable text (round-trips through parse_program)."""
    return str(rule)


def print_program(rules: Iterable[Rule]) -> str:
    return "\n".join(print_rule(r) for r in rules) + "\n"


def is_safe(rule: Rule) -> bool:
    try:
        check_safety(rule)
    except UnsafeRuleError:
        return False
    return True


def check_safety(rule: Rule) -> None:
    """Raise UnsafeRuleError unless every head/NAF variable is bound positively.

    Facts (ground head, empty body) are trivially safe.  Anonymous terms in a
    head are rejected here as well, since they can never be bound.
    """
    if rule.head is not None and any(isinstance(a, Anonymous) for a in rule.head.args):
        raise UnsafeRuleError(str(rule), "_")
    positive: set[str] = set()
    for lit in rule.body:
        if not lit.negated:
            positive.update(a.name for a in lit.atom.args if isinstance(a, Variable))
    required: list[str] = []
    if rule.head is not None:
        required.extend(a.name for a in rule.head.args if isinstance(a, Variable))
    for lit in rule.body:
        if lit.negated:
            required.extend(a.name for a in lit.atom.args if isinstance(a, Variable))
    for name in required:
        if name not in positive:
            raise UnsafeRuleError(str(rule), name)


# ---------------------------------------------------------------------------
# Fact bases
# ---------------------------------------------------------------------------


class FactBase:
    """A set of ground atoms indexed by signature and by first argument.

    Insertion is idempotent; iteration is deterministic (sorted by predicate,
    arity, then arguments).  Treat instances as frozen once they are shared.
    """

    __slots__ = ("_by_sig", "_by_first")

    def __init__(self, atoms: Iterable[Atom] = ()):
        self._by_sig: dict[tuple[str, int], set[Atom]] = {}
        self._by_first: dict[tuple[str, int, Term], set[Atom]] = {}
        for a in atoms:
            self.add(a)

    def add(self, atom: Atom) -> bool:
        """Insert a ground atom; returns False if it was already present."""
        if not atom.is_ground():
            raise ValueError(f"fact base atoms must be ground: {atom}")
        bucket = self._by_sig.setdefault(atom.signature, set())
        if atom in bucket:
            return False
        bucket.add(atom)
        if atom.args:
            key = (atom.pred, len(atom.args), atom.args[0])
            self._by_first.setdefault(key, set()).add(atom)
        return True

    def update(self, atoms: Iterable[Atom]) -> None:
        for a in atoms:
            self.add(a)

    def __contains__(self, atom: Atom) -> bool:
        bucket = self._by_sig.get(atom.signature)
        return bucket is not None and atom in bucket

    def __len__(self) -> int:
        return sum(len(b) for b in self._by_sig.values())

    def __iter__(self) -> Iterator[Atom]:
        for sig in sorted(self._by_sig):
            yield from sorted(self._by_sig[sig], key=Atom.key)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FactBase):
            return NotImplemented
        return {s: b for s, b in self._by_sig.items() if b} == {
            s: b for s, b in other._by_sig.items() if b
        }

    def __repr__(self) -> str:
        return f"FactBase({len(self)} atoms)"

    def copy(self) -> "FactBase":
        fb = FactBase()
        for sig, bucket in self._by_sig.items():
            fb._by_sig[sig] = set(bucket)
        for key, bucket in self._by_first.items():
            fb._by_first[key] = set(bucket)
        return fb

    def signatures(self) -> list[tuple[str, int]]:
        return sorted(s for s, b in self._by_sig.items() if b)

    def with_signature(self, pred: str, arity: int) -> frozenset[Atom]:
        return frozenset(self._by_sig.get((pred, arity), ()))

    def candidates(self, pred: str, arity: int, first: Optional[Term] = None) -> Iterable[Atom]:
        """Atoms matching the signature, narrowed by a bound first argument."""
        if first is not None and arity > 0:
            return self._by_first.get((pred, arity, first), ())
        return self._by_sig.get((pred, arity), ())


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<comment>%[^\n]*)
      | (?P<arrow>:-)
      | (?P<punct>[(),.])
      | (?P<marker>[+$])
      | (?P<directive>\#[A-Za-z_]+)
      | (?P<int>[0-9]+)
      | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<string>"(?:[^"\\\n]|\\.)*")
    """,
    re.VERBOSE,
)


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup or ""
        raw = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, raw, line, col))
        newlines = raw.count("\n")
        if newlines:
            line += newlines
            col = len(raw) - raw.rfind("\n")
        else:
            col += len(raw)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    """Recursive-descent parser over the token stream.

    Mode-declaration support (placeholders, directives) is switched on by the
    mode-file front end; plain program text rejects those tokens.
    """

    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, text: Optional[str] = None) -> _Token:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text if text is not None else kind
            raise ParseError(f"expected {want!r}, found {tok.text!r}", tok.line, tok.col)
        return self.next()

    def at_end(self) -> bool:
        return self.peek().kind == "eof"

    # -- terms and atoms ----------------------------------------------------

    def parse_term(self) -> Term:
        tok = self.peek()
        if tok.kind == "int":
            self.next()
            return int(tok.text)
        if tok.kind == "string":
            self.next()
            body = tok.text[1:-1]
            return Constant(re.sub(r"\\(.)", r"\1", body))
        if tok.kind == "name":
            self.next()
            if tok.text == "_":
                return ANON
            if _VAR_NAME.match(tok.text):
                return Variable(tok.text)
            if _BARE_CONST.match(tok.text):
                return Constant(tok.text)
            raise ParseError(f"invalid name {tok.text!r}", tok.line, tok.col)
        raise ParseError(f"expected a term, found {tok.text!r}", tok.line, tok.col)

    def parse_atom(self) -> Atom:
        tok = self.expect("name")
        if not _BARE_CONST.match(tok.text):
            raise ParseError(f"invalid predicate name {tok.text!r}", tok.line, tok.col)
        pred = tok.text
        args: list[Term] = []
        if self.peek().kind == "punct" and self.peek().text == "(":
            self.next()
            args.append(self.parse_term())
            while self.peek().text == ",":
                self.next()
                args.append(self.parse_term())
            self.expect("punct", ")")
        return Atom(pred, tuple(args))

    def parse_literal(self) -> Literal:
        tok = self.peek()
        negated = False
        if tok.kind == "name" and tok.text == "not":
            self.next()
            negated = True
        return Literal(self.parse_atom(), negated)

    # -- rules ---------------------------------------------------------------

    def parse_rule(self) -> Rule:
        head: Optional[Atom] = None
        body: list[Literal] = []
        if not (self.peek().kind == "arrow"):
            head = self.parse_atom()
        if self.peek().kind == "arrow":
            self.next()
            body.append(self.parse_literal())
            while self.peek().text == ",":
                self.next()
                body.append(self.parse_literal())
        self.expect("punct", ".")
        return Rule(head, tuple(body))


def parse_program(text: str) -> list[Rule]:
    """Parse `.`-terminated rules and facts, in source order.

    Every rule is safety-checked; an unsafe rule aborts the parse with the
    offending variable named.  Headless constraints parse but are rejected by
    the evaluator.
    """
    parser = _Parser(text)
    rules: list[Rule] = []
    while not parser.at_end():
        tok = parser.peek()
        if tok.kind == "directive":
            raise ParseError(f"unexpected directive {tok.text!r}", tok.line, tok.col)
        rule = parser.parse_rule()
        check_safety(rule)
        rules.append(rule)
    return rules


def parse_rule_text(text: str) -> Rule:
    """Parse exactly one rule; convenience for tests and fixtures."""
    rules = parse_program(text)
    if len(rules) != 1:
        raise LogicError(f"expected exactly one rule in {text!r}")
    return rules[0]


def parse_atom_text(text: str) -> Atom:
    rule = parse_rule_text(text if text.rstrip().endswith(".") else text + ".")
    if rule.head is None or rule.body:
        raise LogicError(f"expected a plain atom in {text!r}")
    return rule.head


def facts_and_rules(program: Iterable[Rule]) -> tuple[FactBase, list[Rule]]:
    """Split a program into its ground facts and its proper rules."""
    fb = FactBase()
    proper: list[Rule] = []
    for r in program:
        if r.is_fact() and r.head is not None and r.head.is_ground():
            fb.add(r.head)
        else:
            proper.append(r)
    return fb, proper
