"""Stratified model computation for the function-free rule language.

A program that never recurses through negation has a unique least model.
``stratify`` layers the rules so every negative dependency points strictly
downward; ``evaluate`` then saturates one layer at a time with a naive
fixpoint, joining positive body literals left-to-right and filtering
negation-as-failure literals against the model built so far.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from .logic import (
    Anonymous,
    Atom,
    FactBase,
    Literal,
    LogicError,
    Rule,
    Term,
    Variable,
    facts_and_rules,
    is_ground_term,
)

Signature = tuple[str, int]
Substitution = dict[str, Term]


class NotStratifiedError(LogicError):
    """The program recurses through negation."""

    def __init__(self, cycle: Sequence[str]):
        super().__init__("negative dependency cycle through: " + ", ".join(cycle))
        self.cycle = list(cycle)


@dataclass(frozen=True)
class Stratification:
    strata: tuple[tuple[Rule, ...], ...]
    predicate_level: dict[Signature, int]


def _format_sig(sig: Signature) -> str:
    return f"{sig[0]}/{sig[1]}"


def _strongly_connected_components(
    nodes: Sequence[Signature], adj: dict[Signature, list[Signature]]
) -> list[list[Signature]]:
    """Tarjan's algorithm, iterative; components come out dependencies-first."""
    index: dict[Signature, int] = {}
    low: dict[Signature, int] = {}
    on_stack: set[Signature] = set()
    stack: list[Signature] = []
    components: list[list[Signature]] = []
    counter = itertools.count()

    for root in nodes:
        if root in index:
            continue
        work: list[tuple[Signature, Iterator[Signature]]] = []
        index[root] = low[root] = next(counter)
        stack.append(root)
        on_stack.add(root)
        work.append((root, iter(adj.get(root, ()))))
        while work:
            node, successors = work[-1]
            descended = False
            for succ in successors:
                if succ not in index:
                    index[succ] = low[succ] = next(counter)
                    stack.append(succ)
                    on_stack.add(succ)
                    work.append((succ, iter(adj.get(succ, ()))))
                    descended = True
                    break
                if succ in on_stack:
                    low[node] = min(low[node], index[succ])
            if descended:
                continue
            work.pop()
            if low[node] == index[node]:
                component: list[Signature] = []
                while True:
                    member = stack.pop()
                    on_stack.remove(member)
                    component.append(member)
                    if member == node:
                        break
                components.append(component)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
    return components


def stratify(program: Sequence[Rule]) -> Stratification:
    """Group rules into strata; raise NotStratifiedError on a negative cycle.

    Constraints are rejected here: the pipeline never produces them and the
    model semantics below has no way to honour them.
    """
    rules: list[Rule] = []
    for r in program:
        if r.head is None:
            raise LogicError(f"constraints are not evaluable: {r}")
        rules.append(r)

    # deps[head_sig] = set of (body_sig, negated)
    deps: dict[Signature, set[tuple[Signature, bool]]] = {}
    sigs: set[Signature] = set()
    for r in rules:
        assert r.head is not None
        head_sig = r.head.signature
        sigs.add(head_sig)
        bucket = deps.setdefault(head_sig, set())
        for lit in r.body:
            sigs.add(lit.atom.signature)
            bucket.add((lit.atom.signature, lit.negated))

    adj = {
        head: sorted({sig for sig, _ in pairs})
        for head, pairs in deps.items()
    }
    components = _strongly_connected_components(sorted(sigs), adj)
    component_of: dict[Signature, int] = {}
    for ci, comp in enumerate(components):
        for sig in comp:
            component_of[sig] = ci

    for head_sig, pairs in deps.items():
        for dep_sig, negated in pairs:
            if negated and component_of[dep_sig] == component_of[head_sig]:
                cycle = sorted(_format_sig(s) for s in components[component_of[head_sig]])
                raise NotStratifiedError(cycle)

    # Components are emitted dependencies-first, so one pass assigns levels.
    component_level = [0] * len(components)
    predicate_level: dict[Signature, int] = {}
    for ci, comp in enumerate(components):
        level = 0
        for sig in comp:
            for dep_sig, negated in deps.get(sig, ()):
                dep_ci = component_of[dep_sig]
                if dep_ci != ci:
                    level = max(level, component_level[dep_ci] + (1 if negated else 0))
        component_level[ci] = level
        for sig in comp:
            predicate_level[sig] = level

    depth = max(predicate_level.values(), default=0) + 1
    groups: list[list[Rule]] = [[] for _ in range(depth)]
    for r in rules:
        assert r.head is not None
        groups[predicate_level[r.head.signature]].append(r)
    return Stratification(tuple(tuple(g) for g in groups), predicate_level)


# ---------------------------------------------------------------------------
# Substitution and matching
# ---------------------------------------------------------------------------


def substitute_term(t: Term, subst: Substitution) -> Term:
    if isinstance(t, Variable):
        return subst.get(t.name, t)
    return t


def substitute_atom(atom: Atom, subst: Substitution) -> Atom:
    if not atom.args:
        return atom
    return Atom(atom.pred, tuple(substitute_term(a, subst) for a in atom.args))


def _unify_fact(pattern: Atom, fact: Atom, subst: Substitution) -> Optional[Substitution]:
    """Extend subst so pattern matches the ground fact, or return None."""
    out = subst
    copied = False
    for p, f in zip(pattern.args, fact.args):
        if isinstance(p, Variable):
            bound = out.get(p.name)
            if bound is None:
                if not copied:
                    out = dict(out)
                    copied = True
                out[p.name] = f
            elif bound != f:
                return None
        elif isinstance(p, Anonymous):
            continue
        elif p != f:
            return None
    return out


def model_matches(model: FactBase, pattern: Atom) -> bool:
    """True if some model atom matches the pattern (`_` matches anything)."""
    if pattern.is_ground():
        return pattern in model
    first = pattern.args[0] if pattern.args and is_ground_term(pattern.args[0]) else None
    for fact in model.candidates(pattern.pred, pattern.arity, first):
        if all(
            isinstance(p, Anonymous) or isinstance(p, Variable) or p == f
            for p, f in zip(pattern.args, fact.args)
        ):
            return True
    return False


def _solve_body(model: FactBase, body: Sequence[Literal]) -> Iterator[Substitution]:
    """All substitutions satisfying the body against the model."""
    positives = [lit.atom for lit in body if not lit.negated]
    negatives = [lit.atom for lit in body if lit.negated]

    def extend(i: int, subst: Substitution) -> Iterator[Substitution]:
        if i == len(positives):
            for pat in negatives:
                if model_matches(model, substitute_atom(pat, subst)):
                    return
            yield subst
            return
        pattern = positives[i]
        first: Optional[Term] = None
        if pattern.args:
            bound0 = substitute_term(pattern.args[0], subst)
            if is_ground_term(bound0):
                first = bound0
        for fact in model.candidates(pattern.pred, pattern.arity, first):
            extended = _unify_fact(pattern, fact, subst)
            if extended is not None:
                yield from extend(i + 1, extended)

    yield from extend(0, {})


def derive_heads(model: FactBase, rule: Rule) -> set[Atom]:
    """Ground head instances the rule produces against a fixed model."""
    assert rule.head is not None
    return {substitute_atom(rule.head, s) for s in _solve_body(model, rule.body)}


def _saturate(model: FactBase, rules: Sequence[Rule]) -> None:
    """Naive fixpoint over one stratum, mutating the model."""
    if not rules:
        return
    while True:
        fresh: list[Atom] = []
        for rule in rules:
            assert rule.head is not None
            for subst in _solve_body(model, rule.body):
                derived = substitute_atom(rule.head, subst)
                if derived not in model:
                    fresh.append(derived)
        if not fresh:
            return
        model.update(fresh)


def evaluate(program: Iterable[Rule], facts: FactBase) -> FactBase:
    """Stratified least model of program ∪ facts; inputs are not mutated."""
    program_facts, rules = facts_and_rules(program)
    stratification = stratify(rules)
    model = facts.copy()
    model.update(program_facts)
    for stratum in stratification.strata:
        _saturate(model, stratum)
    return model


def holds(program: Iterable[Rule], facts: FactBase, query: Literal) -> bool:
    """Truth of a ground literal in the stratified model."""
    model = evaluate(program, facts)
    present = model_matches(model, query.atom)
    return not present if query.negated else present
