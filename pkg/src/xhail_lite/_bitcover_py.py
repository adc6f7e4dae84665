"""Pure-Python coverage kernel: masks are arbitrary-width integers.

Mirrors the compiled extension's interface; results must be identical.
"""

from __future__ import annotations

from typing import Sequence


class PackedExamples:
    """Per-example required/forbidden bit masks with weights.

    An example holds for a derived-atom set D when req ⊆ D and avoid ∩ D = ∅;
    a negated example holds when that condition fails.  ``possible_weight``
    bounds achievable coverage for partial assignments where ``din`` bits are
    committed and ``dposs`` bits are still reachable (din ⊆ dposs).
    """

    __slots__ = ("req", "avoid", "negated", "weights", "n")

    def __init__(
        self,
        req: Sequence[int],
        avoid: Sequence[int],
        negated: Sequence[bool],
        weights: Sequence[int],
    ):
        self.req = list(req)
        self.avoid = list(avoid)
        self.negated = [bool(x) for x in negated]
        self.weights = list(weights)
        self.n = len(self.req)
        if not (len(self.avoid) == len(self.negated) == len(self.weights) == self.n):
            raise ValueError("mask/flag/weight lists must have equal length")

    def possible_weight(self, din: int, dposs: int) -> int:
        total = 0
        for i in range(self.n):
            if self.negated[i]:
                if (self.req[i] & ~din) != 0 or (self.avoid[i] & dposs) != 0:
                    total += self.weights[i]
            else:
                if (self.avoid[i] & din) == 0 and (self.req[i] & ~dposs) == 0:
                    total += self.weights[i]
        return total

    def covered_weight(self, d: int) -> int:
        total = 0
        for i in range(self.n):
            sat = (self.req[i] & ~d) == 0 and (self.avoid[i] & d) == 0
            if sat != self.negated[i]:
                total += self.weights[i]
        return total

    def covered_flags(self, d: int) -> list[bool]:
        out = []
        for i in range(self.n):
            sat = (self.req[i] & ~d) == 0 and (self.avoid[i] & d) == 0
            out.append(sat != self.negated[i])
        return out
