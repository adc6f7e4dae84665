"""Anytime hypothesis search: pick sub-rules of the pruned kernel.

A hypothesis keeps a subset of the generalised kernel rules and, within each
kept rule, a subset of its body literals.  The objective is lexicographic,
coverage before size, encoded as a single integer cost in which one point of
uncovered example weight outweighs any possible size difference.  Search is
branch-and-bound over a canonically ordered pool of candidate sub-rules,
deepened iteratively on the number of dropped literals; bounds are tracked the
whole way so an expired budget still yields a best-known hypothesis plus a
certified gap.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .cover import CoverageTable, classify_examples
from .evaluator import derive_heads, evaluate, stratify
from .logic import Atom, FactBase, LogicError, Rule, facts_and_rules, is_safe
from .modes import ExampleSpec, GeneralRule, canonicalize

_MAX_BODY = 16  # sub-rule enumeration is exponential in body length

OnImprove = Callable[[float, int, int], None]


@dataclass(frozen=True)
class HypothesisCandidate:
    rules: tuple[Rule, ...]

    @property
    def size(self) -> int:
        return len(self.rules) + sum(len(r.body) for r in self.rules)

    def __str__(self) -> str:
        return "\n".join(str(r) for r in self.rules)


def cost(candidate: HypothesisCandidate, uncovered_weight: int, total_literals: int) -> int:
    """Uncovered weight dominates: one weight point outranks any size."""
    return uncovered_weight * (total_literals + 1) + candidate.size


@dataclass
class InductionResult:
    hypothesis: HypothesisCandidate
    covered_weight: int
    uncovered: list[ExampleSpec]
    upper_bound: int
    lower_bound: int
    so: float
    optimal: bool
    elapsed_s: float
    # (elapsed_s, upper, lower) at every bound improvement, in order
    events: list[tuple[float, int, int]] = field(default_factory=list)


@dataclass
class _Choice:
    """One admissible sub-rule, shared by every kernel rule it abbreviates."""

    rule: Rule
    key: str  # canonical text, the global ordering
    lits: int
    dmask: int  # universe atoms this sub-rule derives on its own
    min_drop: int


class _Bounds:
    def __init__(self, start: float, on_improve: Optional[OnImprove]):
        self._start = start
        self._on_improve = on_improve
        self.upper: Optional[int] = None
        self.lower = 0
        self.events: list[tuple[float, int, int]] = []

    def _emit(self) -> None:
        assert self.upper is not None
        event = (time.monotonic() - self._start, self.upper, self.lower)
        self.events.append(event)
        if self._on_improve is not None:
            self._on_improve(*event)

    def improve_upper(self, value: int) -> bool:
        if self.upper is None or value < self.upper:
            self.upper = value
            self._emit()
            return True
        return False

    def raise_lower(self, value: int) -> None:
        if value > self.lower:
            self.lower = value
            if self.upper is not None:
                self._emit()


def _sub_rules(rule: Rule) -> list[tuple[int, Rule]]:
    """(dropped count, safe sub-rule) over all body subsets, full body first."""
    body = list(rule.body)
    if len(body) > _MAX_BODY:
        raise LogicError(
            f"cannot enumerate sub-rules of a {len(body)}-literal body (limit {_MAX_BODY})"
        )
    out: list[tuple[int, Rule]] = []
    for dropped in range(len(body) + 1):
        for keep in itertools.combinations(range(len(body)), len(body) - dropped):
            sub = Rule(rule.head, tuple(body[i] for i in keep))
            if is_safe(sub):
                out.append((dropped, sub))
    return out


def induce(
    pruned: Sequence[GeneralRule],
    B: Sequence[Rule],
    context: Sequence[Rule],
    examples: Sequence[ExampleSpec],
    budget_s: float,
    on_improve: Optional[OnImprove] = None,
) -> InductionResult:
    """Best-effort minimisation of cost() over sub-rule selections.

    Anytime: bounds only tighten, and budget expiry returns the incumbent with
    optimal=False and so = (upper - lower) / lower.  The returned coverage is
    re-derived from the evaluator, not from the search's mask bookkeeping.
    """
    start = time.monotonic()
    deadline = start + max(budget_s, 0.0)
    program = list(B) + list(context)
    _facts, proper = facts_and_rules(program)
    full_rules = [g.rule for g in pruned]
    stratify(list(proper) + full_rules)  # candidate space must stay stratifiable
    base_model = evaluate(program, FactBase())

    total_literals = sum(len(r.body) for r in full_rules) + len(full_rules)
    scale = total_literals + 1

    # Candidate pool: distinct canonical sub-rules across all kernel rules.
    by_key: dict[str, _Choice] = {}
    derived_of: dict[str, Rule] = {}
    for g in pruned:
        for drop, sub in _sub_rules(g.rule):
            canon = canonicalize(sub)
            key = str(canon)
            choice = by_key.get(key)
            if choice is not None:
                choice.min_drop = min(choice.min_drop, drop)
            else:
                by_key[key] = _Choice(canon, key, len(canon.body), 0, drop)
                derived_of[key] = sub
    pool = sorted(by_key.values(), key=lambda c: c.key)

    universe_set: set[Atom] = set()
    derivations: dict[str, set[Atom]] = {}
    for c in pool:
        derived = derive_heads(base_model, derived_of[c.key])
        derivations[c.key] = derived
        universe_set |= derived
    universe = sorted(universe_set, key=Atom.key)
    bit_of = {atom: i for i, atom in enumerate(universe)}
    for c in pool:
        for atom in derivations[c.key]:
            c.dmask |= 1 << bit_of[atom]

    head_sigs = {g.rule.head.signature for g in pruned if g.rule.head is not None}
    compiled = classify_examples(
        examples, proper, base_model, head_sigs, frozenset(universe)
    )

    req_masks: list[int] = []
    avoid_masks: list[int] = []
    negateds: list[bool] = []
    weights: list[int] = []
    deep_specs: list[ExampleSpec] = []
    const_covered = 0
    const_uncovered = 0
    uncoverable = 0
    for spec, comp in zip(examples, compiled):
        if comp.kind == "deep":
            deep_specs.append(spec)
        elif comp.kind == "const":
            if comp.covered_const:
                const_covered += comp.weight
            else:
                const_uncovered += comp.weight
        else:
            req = 0
            for a in comp.req:
                req |= 1 << bit_of[a]
            avoid = 0
            for a in comp.forbid:
                avoid |= 1 << bit_of[a]
            req_masks.append(req)
            avoid_masks.append(avoid)
            negateds.append(comp.negated)
            weights.append(comp.weight)
            if not comp.negated and not all(
                any(
                    c.dmask & (1 << bit_of[a]) and not c.dmask & avoid
                    for c in pool
                )
                for a in comp.req
            ):
                # no union of clean sub-rules can reach every required atom
                uncoverable += comp.weight
    table = CoverageTable(len(universe), req_masks, avoid_masks, negateds, weights)
    deep_weight = sum(e.weight for e in deep_specs)
    total_weight = sum(e.weight for e in examples)

    deep_models: dict[tuple[str, ...], int] = {}

    def deep_covered(selection: tuple[_Choice, ...]) -> int:
        if not deep_specs:
            return 0
        keys = tuple(c.key for c in selection)
        covered = deep_models.get(keys)
        if covered is None:
            model = evaluate(program + [c.rule for c in selection], FactBase())
            covered = 0
            for spec in deep_specs:
                present = spec.literal.atom in model
                if (not present) if spec.literal.negated else present:
                    covered += spec.weight
            deep_models[keys] = covered
        return covered

    def exact_uncovered(din: int, selection: tuple[_Choice, ...]) -> int:
        covered = table.covered_weight(din) + const_covered + deep_covered(selection)
        return total_weight - covered

    bounds = _Bounds(start, on_improve)
    unc_empty = exact_uncovered(0, ())
    # Examples no selection can cover floor the bound permanently, plus one
    # size point if anything at all still needs deriving.
    unc_floor_global = const_uncovered + uncoverable
    bounds.lower = unc_floor_global * scale + (1 if unc_empty > unc_floor_global else 0)

    incumbent: tuple[_Choice, ...] = ()
    bounds.improve_upper(unc_empty * scale)

    def consider(selection: tuple[_Choice, ...], din: int, size: int) -> None:
        nonlocal incumbent
        unc = exact_uncovered(din, selection)
        if bounds.improve_upper(unc * scale + size):
            incumbent = selection

    # Greedy seed over the full pool: best coverage gain per literal.
    greedy: tuple[_Choice, ...] = ()
    greedy_din = 0
    greedy_size = 0
    greedy_keys: set[str] = set()
    covered_now = total_weight - unc_empty
    while True:
        best_c: Optional[_Choice] = None
        best_gain = 0
        for c in pool:
            if c.key in greedy_keys:
                continue
            new_cov = (
                table.covered_weight(greedy_din | c.dmask)
                + const_covered
                + deep_covered(greedy + (c,))
            )
            gain = new_cov - covered_now
            if gain <= 0:
                continue
            if best_c is None or gain * (1 + best_c.lits) > best_gain * (1 + c.lits):
                best_c, best_gain = c, gain
        if best_c is None:
            break
        greedy = greedy + (best_c,)
        greedy_din |= best_c.dmask
        greedy_size += 1 + best_c.lits
        greedy_keys.add(best_c.key)
        covered_now += best_gain
    consider(greedy, greedy_din, greedy_size)

    def search(choices: Sequence[_Choice]) -> bool:
        """Exhaust selections over `choices`; False if the deadline struck."""
        k = len(choices)
        suffix = [0] * (k + 1)
        for i in reversed(range(k)):
            suffix[i] = suffix[i + 1] | choices[i].dmask

        def expand(selection: tuple[_Choice, ...], din: int, size: int, start_i: int) -> bool:
            # Optimistic coverage can only fall as the selection grows, so
            # this node's floor also holds for every descendant.
            possible = (
                table.possible_weight(din, din | suffix[start_i])
                + const_covered
                + deep_weight
            )
            unc_floor = total_weight - possible
            for j in range(start_i, k):
                c = choices[j]
                child_size = size + 1 + c.lits
                if unc_floor * scale + child_size >= bounds.upper:
                    continue
                child_din = din | c.dmask
                child_poss = (
                    table.possible_weight(child_din, child_din | suffix[j + 1])
                    + const_covered
                    + deep_weight
                )
                if (total_weight - child_poss) * scale + child_size >= bounds.upper:
                    continue
                if time.monotonic() > deadline:
                    return False
                child = selection + (c,)
                consider(child, child_din, child_size)
                if not expand(child, child_din, child_size, j + 1):
                    return False
            return True

        return expand((), 0, 0, 0)

    proven = False
    if time.monotonic() <= deadline:
        max_drop = max((c.min_drop for c in pool), default=0)
        for depth in range(max_drop + 1):
            completed = search([c for c in pool if c.min_drop <= depth])
            if not completed:
                break
            if depth == max_drop:
                proven = True
            if bounds.upper == bounds.lower:
                proven = True
                break
    if proven:
        assert bounds.upper is not None
        bounds.raise_lower(bounds.upper)

    hypothesis = HypothesisCandidate(
        tuple(c.rule for c in sorted(incumbent, key=lambda c: c.key))
    )
    final_model = evaluate(program + list(hypothesis.rules), FactBase())
    covered_weight = 0
    uncovered: list[ExampleSpec] = []
    for spec in examples:
        present = spec.literal.atom in final_model
        if (not present) if spec.literal.negated else present:
            covered_weight += spec.weight
        else:
            uncovered.append(spec)
    verified = (total_weight - covered_weight) * scale + hypothesis.size
    assert verified == bounds.upper, "mask coverage disagrees with the evaluator"

    upper, lower = bounds.upper, bounds.lower
    so = 0.0 if upper == lower else (upper - lower) / lower
    return InductionResult(
        hypothesis=hypothesis,
        covered_weight=covered_weight,
        uncovered=uncovered,
        upper_bound=upper,
        lower_bound=lower,
        so=so,
        optimal=upper == lower,
        elapsed_s=time.monotonic() - start,
        events=bounds.events,
    )
