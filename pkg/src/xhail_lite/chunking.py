"""Sentence chunking as a rule-learning problem.

POS-tagged sentences become fact bases; gold chunkings become ``goodchunk``
definitions plus examples whose satisfaction forces splits exactly at chunk
boundaries.  A learned hypothesis defines ``split/1``, and prediction reads
the derived split points back off as a chunking.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .evaluator import evaluate
from .logic import Atom, Constant, FactBase, Literal, Rule, parse_rule_text
from .modes import ExampleSpec


class CorpusError(Exception):
    """Malformed token or gold input."""


# Whole tags that are punctuation collapse to a class constant; any other
# non-alphanumeric character maps through a fixed letter table.
_PUNCT_CLASS = {".": "c_p", "?": "c_p", "!": "c_p", ",": "c_c", ";": "c_c", ":": "c_c"}
_CHAR_SUB = {
    "$": "d",
    ".": "p",
    ",": "c",
    ";": "c",
    ":": "c",
    "'": "q",
    "`": "t",
    "-": "m",
    "#": "n",
}


def mangle_tag(tag: str) -> str:
    """POS tag or relation label to a safe lowercase-prefixed constant."""
    cls = _PUNCT_CLASS.get(tag)
    if cls is not None:
        return cls
    out = ["c_"]
    for ch in tag:
        if "a" <= ch <= "z" or "A" <= ch <= "Z" or "0" <= ch <= "9":
            out.append(ch)
        else:
            out.append(_CHAR_SUB.get(ch, "u"))
    return "".join(out)


@dataclass(frozen=True)
class Token:
    index: int
    surface: str
    pos_tag: str
    head: Optional[int] = None
    rel: Optional[str] = None


@dataclass(frozen=True)
class Sentence:
    id: str
    tokens: tuple[Token, ...]

    def __post_init__(self):
        if not self.tokens:
            raise CorpusError(f"sentence {self.id}: no tokens")
        for want, tok in enumerate(self.tokens, start=1):
            if tok.index != want:
                raise CorpusError(
                    f"sentence {self.id}: token indices must run 1..n, "
                    f"found {tok.index} at position {want}"
                )
            if not tok.pos_tag:
                raise CorpusError(f"sentence {self.id}: token {want} has an empty tag")

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class Chunking:
    sentence_id: str
    chunks: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not self.chunks:
            raise CorpusError(f"sentence {self.sentence_id}: empty chunking")
        expect = 1
        for lo, hi in self.chunks:
            if lo != expect:
                raise CorpusError(
                    f"sentence {self.sentence_id}: coverage gap at token {expect}"
                )
            if hi < lo:
                raise CorpusError(
                    f"sentence {self.sentence_id}: empty chunk [{lo},{hi}]"
                )
            expect = hi + 1

    @property
    def n(self) -> int:
        return self.chunks[-1][1]


# ---------------------------------------------------------------------------
# Corpus files
# ---------------------------------------------------------------------------


def _parse_head_rel(field: str, where: str) -> tuple[Optional[int], Optional[str]]:
    if field == "_":
        return None, None
    head_text, sep, rel = field.partition(":")
    if not sep or not rel:
        raise CorpusError(f"{where}: head:rel field {field!r} is not HEAD:REL or _")
    try:
        head = int(head_text)
    except ValueError:
        raise CorpusError(f"{where}: head {head_text!r} is not an integer") from None
    return head, rel


def _parse_token_file(text: str) -> list[Sentence]:
    sentences: list[Sentence] = []
    block: list[tuple[str, Token]] = []

    def flush() -> None:
        if not block:
            return
        sid = block[0][0]
        for other, tok in block[1:]:
            if other != sid:
                raise CorpusError(
                    f"sentence {sid}: token {tok.index} carries id {other!r}"
                )
        sentences.append(Sentence(sid, tuple(tok for _sid, tok in block)))
        block.clear()

    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            flush()
            continue
        where = f"token file line {lineno}"
        cols = line.rstrip("\n").split("\t")
        if len(cols) != 5:
            raise CorpusError(f"{where}: expected 5 tab-separated columns, got {len(cols)}")
        sid, idx_text, surface, tag, head_rel = cols
        try:
            idx = int(idx_text)
        except ValueError:
            raise CorpusError(f"{where}: token index {idx_text!r} is not an integer") from None
        head, rel = _parse_head_rel(head_rel, where)
        block.append((sid, Token(idx, surface, tag, head, rel)))
    flush()
    if not sentences:
        raise CorpusError("token file contains no sentences")
    return sentences


def _parse_gold_line(sentence: Sentence, line: str, lineno: int) -> Chunking:
    sizes: list[int] = []
    depth = 0
    count = 0
    for word in line.split():
        if word == "[":
            if depth:
                raise CorpusError(f"gold file line {lineno}: nested '['")
            depth = 1
            count = 0
        elif word == "]":
            if not depth:
                raise CorpusError(f"gold file line {lineno}: unmatched ']'")
            if count == 0:
                raise CorpusError(f"gold file line {lineno}: empty chunk")
            depth = 0
            sizes.append(count)
        else:
            if not depth:
                raise CorpusError(
                    f"gold file line {lineno}: token {word!r} outside brackets"
                )
            count += 1
            i = sum(sizes) + count
            if i <= len(sentence) and sentence.tokens[i - 1].surface != word:
                raise CorpusError(
                    f"sentence {sentence.id}: gold token {i} is {word!r} "
                    f"but the sentence has {sentence.tokens[i - 1].surface!r}"
                )
    if depth:
        raise CorpusError(f"gold file line {lineno}: unterminated '['")
    covered = sum(sizes)
    if covered < len(sentence):
        raise CorpusError(
            f"sentence {sentence.id}: coverage gap at token {covered + 1}"
        )
    if covered > len(sentence):
        raise CorpusError(
            f"sentence {sentence.id}: gold has {covered} tokens "
            f"but the sentence has {len(sentence)}"
        )
    chunks = []
    lo = 1
    for size in sizes:
        chunks.append((lo, lo + size - 1))
        lo += size
    return Chunking(sentence.id, tuple(chunks))


def load_tokens(token_file: str) -> list[Sentence]:
    with open(token_file, encoding="utf-8") as fh:
        return _parse_token_file(fh.read())


def load_corpus(token_file: str, gold_file: str) -> list[tuple[Sentence, Chunking]]:
    """Token TSV plus one bracketed gold line per sentence, paired by order."""
    sentences = load_tokens(token_file)
    with open(gold_file, encoding="utf-8") as fh:
        gold_lines = [line for line in fh.read().splitlines() if line.strip()]
    if len(gold_lines) != len(sentences):
        raise CorpusError(
            f"{len(sentences)} sentences but {len(gold_lines)} gold lines"
        )
    return [
        (s, _parse_gold_line(s, line, lineno))
        for lineno, (s, line) in enumerate(zip(sentences, gold_lines), start=1)
    ]


# ---------------------------------------------------------------------------
# Encoding
# ---------------------------------------------------------------------------

BACKGROUND: tuple[Rule, ...] = (
    parse_rule_text("postype(X) :- pos(X,_)."),
    parse_rule_text("token(X) :- pos(_,X)."),
)

DEFAULT_MODE = """\
#modeh split(+token).
#modeb pos($postype,+token).
#modeb nextpos($postype,+token).
"""


def sentence_facts(s: Sentence, offset: int = 0) -> FactBase:
    """Ground facts describing one sentence, token indices shifted by offset."""
    tags = [mangle_tag(t.pos_tag) for t in s.tokens]
    atoms: list[Atom] = []
    for tok, tag in zip(s.tokens, tags):
        i = tok.index + offset
        atoms.append(Atom("pos", (Constant(tag), i)))
        atoms.append(Atom("form", (i, Constant(tok.surface))))
        if tok.head is not None:
            parent = Constant("root") if tok.head == 0 else tok.head + offset
            atoms.append(Atom("head", (parent, i)))
        if tok.rel is not None:
            atoms.append(Atom("rel", (Constant(mangle_tag(tok.rel)), i)))
        atoms.append(Atom("token", (i,)))
    for tag in sorted(set(tags)):
        atoms.append(Atom("postype", (Constant(tag),)))
    for k in range(len(tags) - 1):
        atoms.append(Atom("nextpos", (Constant(tags[k + 1]), s.tokens[k].index + offset)))
    return FactBase(atoms)


def _quoted(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def sentence_facts_text(s: Sentence) -> str:
    """The sentence's facts as rule text, one token per line, extras after."""
    lines: list[str] = []
    facts = sentence_facts(s)
    by_token: dict[int, list[str]] = {}
    rest: list[str] = []
    for atom in facts:
        if atom.pred == "form":
            i, surface = atom.args
            assert isinstance(surface, Constant)
            by_token.setdefault(i, []).append(f"form({i},{_quoted(surface.symbol)}).")
        elif atom.pred in ("pos", "head", "rel"):
            by_token.setdefault(atom.args[1], []).append(f"{atom}.")
        else:
            rest.append(f"{atom}.")
    order = {"pos": 0, "head": 1, "form": 2, "rel": 3}
    for i in sorted(by_token):
        parts = sorted(by_token[i], key=lambda s: order[s.split("(")[0]])
        lines.append(" ".join(parts))
    lines.extend(rest)
    return "\n".join(lines) + "\n"


def make_examples(
    c: Chunking, offset: int = 0
) -> tuple[list[Rule], list[ExampleSpec]]:
    """goodchunk definition + example per chunk: split at the borders only."""
    n = c.n
    rules: list[Rule] = []
    examples: list[ExampleSpec] = []
    for lo, hi in c.chunks:
        body: list[Literal] = []
        if lo > 1:
            body.append(Literal(Atom("split", (offset + lo - 1,))))
        for i in range(lo, hi):
            body.append(Literal(Atom("split", (offset + i,)), negated=True))
        if hi < n:
            body.append(Literal(Atom("split", (offset + hi,))))
        head = Atom("goodchunk", (offset + lo,))
        rules.append(Rule(head, tuple(body)))
        examples.append(ExampleSpec(Literal(head)))
    return rules, examples


def corpus_problem(
    corpus: Sequence[tuple[Sentence, Chunking]]
) -> tuple[list[Rule], list[ExampleSpec]]:
    """One joint learning problem; sentences occupy disjoint index ranges."""
    program: list[Rule] = list(BACKGROUND)
    examples: list[ExampleSpec] = []
    offset = 0
    for s, c in corpus:
        if len(s) != c.n:
            raise CorpusError(
                f"sentence {s.id}: {len(s)} tokens but chunking covers {c.n}"
            )
        for atom in sentence_facts(s, offset=offset):
            program.append(Rule(atom, ()))
        rules, ex = make_examples(c, offset=offset)
        program.extend(rules)
        examples.extend(ex)
        offset += len(s)
    return program, examples


def predict(hypothesis: Sequence[Rule], s: Sentence) -> Chunking:
    """Chunking read off the split atoms the hypothesis derives."""
    model = evaluate(list(hypothesis) + list(BACKGROUND), sentence_facts(s))
    n = len(s)
    splits = sorted(
        a.args[0]
        for a in model.candidates("split", 1)
        if isinstance(a.args[0], int) and 1 <= a.args[0] < n
    )
    chunks: list[tuple[int, int]] = []
    lo = 1
    for boundary in splits:
        chunks.append((lo, boundary))
        lo = boundary + 1
    chunks.append((lo, n))
    return Chunking(s.id, tuple(chunks))


def chunking_text(c: Chunking, s: Sentence) -> str:
    """Bracketed surface rendering, the gold-file line format."""
    parts: list[str] = []
    for lo, hi in c.chunks:
        parts.append("[")
        parts.extend(s.tokens[i - 1].surface for i in range(lo, hi + 1))
        parts.append("]")
    return " ".join(parts)
