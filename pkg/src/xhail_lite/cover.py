"""Coverage tables: how example truth responds to a set of derivable atoms.

Both search stages reason about candidate atom sets drawn from a fixed
universe (abducible instances, or atoms a hypothesis rule can derive).  Most
examples compile to required/forbidden masks over that universe, which lets
branch-and-bound score partial assignments in a few machine-word operations
per example.  Examples whose truth cannot be expressed that way are classified
``deep`` and fall back to full model computation.

The mask loops live in a compiled extension when available; set
``XHAIL_LITE_COVER=py`` (or ``=c``) to force a backend.
"""

from __future__ import annotations

import os
from array import array
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .logic import Atom, FactBase, Rule
from .modes import ExampleSpec

try:
    from . import _bitcover as _compiled
except ImportError:  # pragma: no cover - depends on build environment
    _compiled = None

from . import _bitcover_py as _pure

Signature = tuple[str, int]


def available_backends() -> list[str]:
    return ["c", "py"] if _compiled is not None else ["py"]


def default_backend() -> str:
    forced = os.environ.get("XHAIL_LITE_COVER", "").strip().lower()
    if forced in ("py", "python"):
        return "py"
    if forced in ("c", "ext", "compiled"):
        if _compiled is None:
            raise RuntimeError("compiled coverage backend requested but not built")
        return "c"
    if forced:
        raise RuntimeError(f"unknown coverage backend {forced!r}")
    return "c" if _compiled is not None else "py"


class CoverageTable:
    """Mask-compiled examples over a bit universe, behind a backend."""

    def __init__(
        self,
        width_bits: int,
        req: Sequence[int],
        avoid: Sequence[int],
        negated: Sequence[bool],
        weights: Sequence[int],
        backend: Optional[str] = None,
    ):
        self.width_bits = max(width_bits, 1)
        self.words = (self.width_bits + 63) // 64
        self.n = len(req)
        self.total_weight = sum(weights)
        self.backend = backend or default_backend()
        if self.backend == "py":
            self._packed = _pure.PackedExamples(req, avoid, negated, weights)
        elif self.backend == "c":
            if _compiled is None:
                raise RuntimeError("compiled coverage backend requested but not built")
            nbytes = self.words * 8
            req_arr = array("Q")
            req_arr.frombytes(b"".join(m.to_bytes(nbytes, "little") for m in req))
            avoid_arr = array("Q")
            avoid_arr.frombytes(b"".join(m.to_bytes(nbytes, "little") for m in avoid))
            neg_arr = array("B", (1 if x else 0 for x in negated))
            weight_arr = array("q", weights)
            if not req:
                # zero-length memoryviews still need a valid buffer
                req_arr = array("Q", [0])[:0]
                avoid_arr = array("Q", [0])[:0]
            self._packed = _compiled.PackedExamples(
                req_arr, avoid_arr, neg_arr, weight_arr, self.words
            )
        else:
            raise RuntimeError(f"unknown coverage backend {self.backend!r}")

    def _words_of(self, mask: int):
        arr = array("Q")
        arr.frombytes(mask.to_bytes(self.words * 8, "little"))
        return arr

    def possible_weight(self, din: int, dposs: int) -> int:
        if self.n == 0:
            return 0
        if self.backend == "py":
            return self._packed.possible_weight(din, dposs)
        return self._packed.possible_weight(self._words_of(din), self._words_of(dposs))

    def covered_weight(self, d: int) -> int:
        if self.n == 0:
            return 0
        if self.backend == "py":
            return self._packed.covered_weight(d)
        return self._packed.covered_weight(self._words_of(d))

    def covered_flags(self, d: int) -> list[bool]:
        if self.n == 0:
            return []
        if self.backend == "py":
            return self._packed.covered_flags(d)
        return self._packed.covered_flags(self._words_of(d))


# ---------------------------------------------------------------------------
# Example classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CompiledExample:
    """How one example's truth depends on the chosen atom set.

    kind "mask": holds iff req ⊆ D and forbid ∩ D = ∅, inverted when the
    example literal is negated.  kind "const": truth is fixed regardless of D.
    kind "deep": needs a full model computation.
    """

    kind: str
    weight: int
    negated: bool = False
    req: frozenset[Atom] = field(default_factory=frozenset)
    forbid: frozenset[Atom] = field(default_factory=frozenset)
    covered_const: bool = False


def dependent_signatures(rules: Sequence[Rule], seeds: set[Signature]) -> set[Signature]:
    """Predicates whose truth may change when atoms of seed predicates do."""
    dependent = set(seeds)
    changed = True
    while changed:
        changed = False
        for r in rules:
            if r.head is None:
                continue
            head_sig = r.head.signature
            if head_sig in dependent:
                continue
            if any(lit.atom.signature in dependent for lit in r.body):
                dependent.add(head_sig)
                changed = True
    return dependent


def _const(example: ExampleSpec, covered: bool) -> CompiledExample:
    return CompiledExample("const", example.weight, covered_const=covered)


def classify_examples(
    examples: Sequence[ExampleSpec],
    rules: Sequence[Rule],
    base_model: FactBase,
    derivable_sigs: set[Signature],
    universe: frozenset[Atom],
) -> list[CompiledExample]:
    """Compile each example against a universe of potentially-true atoms.

    ``base_model`` is the model with no universe atom true; ``derivable_sigs``
    are the predicates the universe atoms belong to (hypothesis heads).  Rules
    are the proper rules of the surrounding program.
    """
    dependent = dependent_signatures(rules, derivable_sigs)
    head_sigs_with_rules = {r.head.signature for r in rules if r.head is not None}
    out: list[CompiledExample] = []
    for example in examples:
        literal = example.literal
        atom = literal.atom
        sig = atom.signature
        if sig in derivable_sigs:
            if sig in head_sigs_with_rules:
                out.append(CompiledExample("deep", example.weight))
            elif atom in universe:
                out.append(
                    CompiledExample(
                        "mask", example.weight, literal.negated, frozenset((atom,))
                    )
                )
            else:
                out.append(_const(example, covered=literal.negated))
            continue
        if sig not in dependent:
            covered = (atom in base_model) != literal.negated
            out.append(_const(example, covered))
            continue

        exact_defs = [r for r in rules if r.head == atom]
        overlapping = any(
            r.head is not None
            and r.head.signature == sig
            and r.head != atom
            and not r.head.is_ground()
            for r in rules
        )
        if overlapping or len(exact_defs) > 1:
            out.append(CompiledExample("deep", example.weight))
            continue
        if not exact_defs:
            out.append(_const(example, covered=literal.negated))
            continue

        req: set[Atom] = set()
        forbid: set[Atom] = set()
        unsat = False
        deep = False
        for body_lit in exact_defs[0].body:
            b = body_lit.atom
            if not b.is_ground():
                deep = True
                break
            if b.signature in derivable_sigs:
                if b in universe:
                    (forbid if body_lit.negated else req).add(b)
                elif not body_lit.negated:
                    unsat = True
                    break
                # a negated literal over an underivable atom always holds
            elif b.signature in dependent:
                deep = True
                break
            else:
                true_in_base = b in base_model
                if body_lit.negated == true_in_base:
                    unsat = True
                    break
        if deep:
            out.append(CompiledExample("deep", example.weight))
        elif unsat or (req & forbid):
            out.append(_const(example, covered=literal.negated))
        else:
            out.append(
                CompiledExample(
                    "mask",
                    example.weight,
                    literal.negated,
                    frozenset(req),
                    frozenset(forbid),
                )
            )
    return out
