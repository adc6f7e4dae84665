#!/usr/bin/env python3
"""Benchmark the compiled coverage backend against the pure-Python one.

Builds identical random coverage tables on both backends and times the two
hot calls of the hypothesis search (covered_weight on exact literal sets,
possible_weight on definite/possible mask pairs).  Checksums of the results
are compared, so a run doubles as a parity check.

Usage:
    python benchmarks/bench_cover.py
    python benchmarks/bench_cover.py --shapes 256x128 8192x512 --calls 20000
"""

import argparse
import sys
import time
from random import Random

from xhail_lite.cover import CoverageTable, available_backends


def random_table(rng, n, width, backend):
    req, avoid, negated, weights = [], [], [], []
    for _ in range(n):
        r = rng.getrandbits(width) & rng.getrandbits(width)
        a = rng.getrandbits(width) & rng.getrandbits(width) & ~r
        req.append(r)
        avoid.append(a)
        negated.append(rng.random() < 0.25)
        weights.append(rng.randrange(1, 6))
    return CoverageTable(width, req, avoid, negated, weights, backend=backend)


def bench(table, masks, pairs):
    out = {}
    sink = 0
    t0 = time.perf_counter()
    for d in masks:
        sink += table.covered_weight(d)
    out["covered_weight"] = (time.perf_counter() - t0, sink)
    sink = 0
    t0 = time.perf_counter()
    for din, dposs in pairs:
        sink += table.possible_weight(din, dposs)
    out["possible_weight"] = (time.perf_counter() - t0, sink)
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--shapes", nargs="+", default=["64x64", "512x256", "4096x512"],
                    metavar="NxW", help="examples x literal-width pairs to test")
    ap.add_argument("--calls", type=int, default=10_000, help="calls per timing loop")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    backends = available_backends()
    if backends != ["c", "py"]:
        print(f"note: backends available: {backends}", file=sys.stderr)

    header = f"{'shape':>10}  {'call':<16}" + "".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)

    for shape in args.shapes:
        n, width = (int(p) for p in shape.split("x"))
        rng = Random(args.seed)
        masks = [rng.getrandbits(width) for _ in range(args.calls)]
        pairs = []
        for _ in range(args.calls):
            din = rng.getrandbits(width) & rng.getrandbits(width)
            pairs.append((din, din | rng.getrandbits(width)))

        results = {b: bench(random_table(Random(args.seed + 1), n, width, b), masks, pairs)
                   for b in backends}
        for call in ("covered_weight", "possible_weight"):
            sums = {results[b][call][1] for b in backends}
            if len(sums) != 1:
                print(f"PARITY FAILURE for {call} on {shape}: {sums}", file=sys.stderr)
                return 1
            row = f"{shape:>10}  {call:<16}"
            for b in backends:
                ns = results[b][call][0] / args.calls * 1e9
                row += f"{ns:>10.0f}ns"
            if len(backends) == 2:
                row += f"{results['py'][call][0] / results['c'][call][0]:>9.1f}x"
            print(row)
    return 0


if __name__ == "__main__":
    sys.exit(main())
