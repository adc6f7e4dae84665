"""Kernel construction: abduce head atoms, deduce ground rules, prune by support.

Abduction picks a set Δ of ground head-declaration instances that maximises
covered example weight, then minimises |Δ|, with a lexicographic tie on the
atom set itself.  Deduction turns each δ ∈ Δ into one ground rule whose body
holds in the abductive model.  Pruning keeps generalised rules whose support
exceeds the threshold.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .cover import CoverageTable, classify_examples
from .evaluator import evaluate
from .logic import Atom, FactBase, Literal, Rule, facts_and_rules, term_key
from .modes import MARKER_INPUT, ExampleSpec, GeneralRule, ModeBias, ModeError


@dataclass
class AbductionResult:
    delta: FactBase
    covered: int
    uncovered: list[ExampleSpec]
    optimal: bool


@dataclass
class GroundKernel:
    rules: list[Rule]
    origins: list[Atom]  # the delta atom each rule defines


def _type_extension(model: FactBase, type_name: str) -> list:
    return sorted((a.args[0] for a in model.candidates(type_name, 1)), key=term_key)


def _candidate_atoms(bias: ModeBias, model: FactBase) -> list[Atom]:
    """All ground head-declaration instances over the declared type extensions."""
    atoms: set[Atom] = set()
    for decl in bias.head_decls:
        pools = []
        feasible = True
        for _marker, type_name in decl.placeholders:
            extension = _type_extension(model, type_name)
            if not extension:
                feasible = False
                break
            pools.append(extension)
        if not feasible:
            continue
        for combo in itertools.product(*pools):
            atoms.add(Atom(decl.predicate, tuple(combo)))
    return sorted(atoms, key=Atom.key)


def _iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass
class _ComponentResult:
    chosen: int  # local bit mask
    proven: bool


def _solve_component(
    local_atoms: Sequence[Atom],
    masks: Sequence[tuple[int, int, bool, int]],  # (req, avoid, negated, weight)
    deep_specs: Sequence[ExampleSpec],
    program: Sequence[Rule],
    deadline: float,
) -> _ComponentResult:
    """Lexicographic minimisation of (uncovered weight, |Δ|, Δ) over one component."""
    n = len(local_atoms)
    table = CoverageTable(
        n,
        [m[0] for m in masks],
        [m[1] for m in masks],
        [m[2] for m in masks],
        [m[3] for m in masks],
    )
    deep_weight = sum(e.weight for e in deep_specs)
    total_weight = table.total_weight + deep_weight
    full = (1 << n) - 1
    # bits i..n-1 still undecided once candidates 0..i-1 are fixed
    suffix = [(full >> i) << i for i in range(n)] + [0]

    deep_models: dict[int, FactBase] = {}

    def deep_covered(din: int) -> int:
        if not deep_specs:
            return 0
        model = deep_models.get(din)
        if model is None:
            atoms = [local_atoms[b] for b in _iter_bits(din)]
            model = evaluate(program, FactBase(atoms))
            deep_models[din] = model
        covered = 0
        for spec in deep_specs:
            present = spec.literal.atom in model
            if (not present) if spec.literal.negated else present:
                covered += spec.weight
        return covered

    def judge(din: int) -> tuple[int, int, tuple[int, ...]]:
        covered = table.covered_weight(din) + deep_covered(din)
        return (total_weight - covered, din.bit_count(), tuple(_iter_bits(din)))

    best_key = judge(0)
    best_din = 0
    seed = 0
    for req, _avoid, negated, _w in masks:
        if not negated:
            seed |= req
    if seed:
        key = judge(seed)
        if key < best_key:
            best_key, best_din = key, seed

    # Explicit stack, exclusion branch explored first (favours small Δ).
    aborted = False
    stack: list[tuple[int, int]] = [(0, 0)]
    while stack:
        if time.monotonic() > deadline:
            aborted = True
            break
        i, din = stack.pop()
        if i == n:
            key = judge(din)
            if key < best_key:
                best_key, best_din = key, din
            continue
        possible = table.possible_weight(din, din | suffix[i]) + deep_weight
        unc_floor = total_weight - possible
        if (unc_floor, din.bit_count()) > (best_key[0], best_key[1]):
            continue
        stack.append((i + 1, din | (1 << i)))
        stack.append((i + 1, din))
    return _ComponentResult(best_din, proven=not aborted)


def abduce(
    B: Sequence[Rule],
    examples: Sequence[ExampleSpec],
    context: Sequence[Rule],
    bias: ModeBias,
    budget_s: float,
) -> AbductionResult:
    """Best-effort search for the atom set explaining the most example weight.

    Anytime: on budget expiry the best-known Δ is returned with optimal=False.
    The reported coverage is re-derived from the evaluator, not the search's
    internal bookkeeping.
    """
    deadline = time.monotonic() + max(budget_s, 0.0)
    program = list(B) + list(context)
    base_model = evaluate(program, FactBase())
    candidates = _candidate_atoms(bias, base_model)
    if not candidates:
        raise ModeError("no candidate abducibles: every head type extension is empty")
    index = {atom: i for i, atom in enumerate(candidates)}
    n = len(candidates)

    _facts, proper = facts_and_rules(program)
    modeh_sigs = {d.signature for d in bias.head_decls}
    compiled = classify_examples(
        examples, proper, base_model, modeh_sigs, frozenset(candidates)
    )

    masks: list[tuple[int, int, bool, int]] = []
    deep_specs: list[ExampleSpec] = []
    for spec, comp in zip(examples, compiled):
        if comp.kind == "deep":
            deep_specs.append(spec)
        elif comp.kind == "mask":
            req = 0
            for a in comp.req:
                req |= 1 << index[a]
            avoid = 0
            for a in comp.forbid:
                avoid |= 1 << index[a]
            if req == 0 and avoid == 0:
                continue  # constant truth, no influence on the search
            masks.append((req, avoid, comp.negated, comp.weight))
        # "const" examples cannot be influenced either way

    # Union-find over candidates: examples only couple the atoms they mention,
    # so the search decomposes into independent blocks (per sentence, in the
    # chunking encoding).  Deep examples couple everything.
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    for req, avoid, _neg, _w in masks:
        bits = list(_iter_bits(req | avoid))
        for b in bits[1:]:
            union(bits[0], b)
    if deep_specs:
        for b in range(1, n):
            union(0, b)

    members: dict[int, list[int]] = {}
    for i in range(n):
        members.setdefault(find(i), []).append(i)
    mask_of_root: dict[int, list[tuple[int, int, bool, int]]] = {r: [] for r in members}
    for req, avoid, neg, w in masks:
        root = find(next(_iter_bits(req | avoid)))
        mask_of_root[root].append((req, avoid, neg, w))

    chosen: set[Atom] = set()
    all_proven = True
    for root in sorted(members, key=lambda r: members[r][0]):
        indices = members[root]
        local_masks = mask_of_root[root]
        local_deep = deep_specs if deep_specs else []
        if not local_masks and not local_deep:
            continue  # unconstrained atoms: the minimum leaves them out
        to_local = {g: l for l, g in enumerate(indices)}

        def relocate(mask: int) -> int:
            out = 0
            for b in _iter_bits(mask):
                out |= 1 << to_local[b]
            return out

        local = [
            (relocate(req), relocate(avoid), neg, w)
            for req, avoid, neg, w in local_masks
        ]
        result = _solve_component(
            [candidates[g] for g in indices], local, local_deep, program, deadline
        )
        all_proven = all_proven and result.proven
        for b in _iter_bits(result.chosen):
            chosen.add(candidates[indices[b]])

    delta = FactBase(sorted(chosen, key=Atom.key))
    final_model = evaluate(program, delta)
    covered = 0
    uncovered: list[ExampleSpec] = []
    for spec in examples:
        present = spec.literal.atom in final_model
        if (not present) if spec.literal.negated else present:
            covered += 1
        else:
            uncovered.append(spec)
    return AbductionResult(delta, covered, uncovered, optimal=all_proven)


def deduce(
    B: Sequence[Rule],
    context: Sequence[Rule],
    delta: Iterable[Atom],
    bias: ModeBias,
) -> GroundKernel:
    """One ground rule per δ: type guards plus the mode-declared body literals
    whose instances hold (or, negated, fail) in the abductive model, linked
    through the head's input constants."""
    program = list(B) + list(context)
    delta_atoms = sorted(delta, key=Atom.key)
    mod = evaluate(program, FactBase(delta_atoms))

    rules: list[Rule] = []
    origins: list[Atom] = []
    for head in delta_atoms:
        decl = bias.head_decl_for(head.signature)
        if decl is None:
            raise ModeError(f"delta atom {head} matches no #modeh declaration")
        head_plus = [
            (type_name, arg)
            for (marker, type_name), arg in zip(decl.placeholders, head.args)
            if marker == MARKER_INPUT
        ]
        body: list[Literal] = []
        seen: set[Literal] = set()

        def push(lit: Literal) -> None:
            if lit.atom != head and lit not in seen:
                seen.add(lit)
                body.append(lit)

        for type_name, const in head_plus:
            push(Literal(Atom(type_name, (const,))))
        for bdecl in bias.body_decls:
            pools = []
            feasible = True
            for marker, type_name in bdecl.placeholders:
                if marker == MARKER_INPUT:
                    pool = list(dict.fromkeys(c for t, c in head_plus if t == type_name))
                else:
                    pool = _type_extension(mod, type_name)
                if not pool:
                    feasible = False
                    break
                pools.append(pool)
            if not feasible:
                continue
            for combo in itertools.product(*pools):
                atom = Atom(bdecl.predicate, tuple(combo))
                if bdecl.negated != (atom in mod):
                    push(Literal(atom, bdecl.negated))
        rules.append(Rule(head, tuple(body)))
        origins.append(head)
    return GroundKernel(rules, origins)


def prune_kernel(general: Sequence[GeneralRule], pr: int) -> list[GeneralRule]:
    """Keep exactly the rules with support strictly above pr, in order."""
    if pr < 0:
        raise ValueError(f"pruning threshold must be non-negative, got {pr}")
    return [g for g in general if g.support > pr]
