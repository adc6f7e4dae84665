"""End-to-end learning: abduce, deduce, generalise, prune, induce."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .induction import InductionResult, OnImprove, induce
from .kernel import AbductionResult, GroundKernel, abduce, deduce, prune_kernel
from .logic import Rule
from .modes import ExampleSpec, GeneralRule, ModeBias, aggregate_support

DEFAULT_BUDGET_S = 1800.0


@dataclass
class LearnResult:
    abduction: AbductionResult
    kernel: GroundKernel
    general: list[GeneralRule]
    pruned: list[GeneralRule]
    induction: InductionResult

    @property
    def hypothesis(self) -> tuple[Rule, ...]:
        return self.induction.hypothesis.rules


def learn(
    B: Sequence[Rule],
    examples: Sequence[ExampleSpec],
    context: Sequence[Rule],
    bias: ModeBias,
    pr: int = 0,
    budget_s: float = DEFAULT_BUDGET_S,
    on_improve: Optional[OnImprove] = None,
) -> LearnResult:
    """Run the full pipeline.  Both search stages share the budget value;
    each gets its own clock, so worst-case wall time is about twice budget_s."""
    abduction = abduce(B, examples, context, bias, budget_s)
    kernel = deduce(B, context, abduction.delta, bias)
    general = aggregate_support(kernel.rules, bias)
    pruned = prune_kernel(general, pr)
    induction = induce(pruned, B, context, examples, budget_s, on_improve)
    return LearnResult(abduction, kernel, general, pruned, induction)
