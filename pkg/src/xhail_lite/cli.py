"""Command-line front end: learn, predict, score, xval.

Exit codes: 0 success, 1 usage error, 2 pipeline or data error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Optional, Sequence

from .chunking import (
    DEFAULT_MODE,
    CorpusError,
    chunking_text,
    corpus_problem,
    load_corpus,
    load_tokens,
    predict,
)
from .harness import (
    corpus_score,
    cross_validate,
    paired_t_test_one_tailed,
    report_dict,
    score,
)
from .logic import LogicError, parse_program
from .modes import parse_mode_file
from .pipeline import DEFAULT_BUDGET_S, learn


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here is exit 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> _Parser:
    parser = _Parser(prog="xhail-lite", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p: argparse.ArgumentParser, budget: bool = True) -> None:
        p.add_argument("--tokens", help="token TSV file")
        p.add_argument("--gold", help="gold chunking file, one bracketed line per sentence")
        p.add_argument("--out", help="output file (default: stdout)")
        if budget:
            p.add_argument("--pr", type=int, default=0, help="support pruning threshold")
            p.add_argument(
                "--budget", type=float, default=DEFAULT_BUDGET_S,
                help="search budget per stage, seconds",
            )
            p.add_argument(
                "--verbose-solver", action="store_true",
                help="stream bound improvements to stderr",
            )

    p_learn = sub.add_parser("learn", help="learn a hypothesis")
    p_learn.add_argument("--mode", required=True, help="mode bias file")
    common(p_learn)

    p_predict = sub.add_parser("predict", help="chunk sentences with a hypothesis")
    p_predict.add_argument("--hypothesis", required=True, help="hypothesis rule file")
    common(p_predict, budget=False)

    p_score = sub.add_parser("score", help="score predictions against gold")
    p_score.add_argument("--pred", required=True, help="predicted chunking file")
    common(p_score, budget=False)

    p_xval = sub.add_parser("xval", help="k-fold cross-validation")
    p_xval.add_argument("--mode", help="mode bias file (default: built-in chunking bias)")
    p_xval.add_argument("--folds", type=int, default=11)
    p_xval.add_argument("--test-tokens", help="held-out test token file")
    p_xval.add_argument("--test-gold", help="held-out test gold file")
    p_xval.add_argument("--compare", help="other run report for the paired t-test")
    p_xval.add_argument("--shuffle-seed", type=int, default=None)
    common(p_xval)
    return parser


def _validate(parser: _Parser, args: argparse.Namespace) -> None:
    if getattr(args, "pr", 0) < 0:
        parser.error("--pr must be >= 0")
    if getattr(args, "budget", 0.0) < 0:
        parser.error("--budget must be >= 0")
    if args.command == "xval" and args.folds < 2:
        parser.error("--folds must be >= 2")
    if args.command == "learn" and (args.tokens is None) != (args.gold is None):
        parser.error("--tokens and --gold must be given together")
    if args.command in ("score", "xval") and (args.tokens is None or args.gold is None):
        parser.error(f"{args.command} requires --tokens and --gold")
    if args.command == "predict" and args.tokens is None:
        parser.error("predict requires --tokens")
    if args.command == "xval" and (args.test_tokens is None) != (args.test_gold is None):
        parser.error("--test-tokens and --test-gold must be given together")


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _solver_printer(prefix: str = ""):
    def emit(elapsed: float, upper: int, lower: int) -> None:
        print(f"{prefix}bounds ub={upper} lb={lower} at {elapsed:.3f}s", file=sys.stderr)

    return emit


def cmd_learn(args: argparse.Namespace) -> int:
    bias, examples, mode_rules = parse_mode_file(_read(args.mode))
    examples = list(examples)
    context = []
    if args.tokens is not None:
        corpus = load_corpus(args.tokens, args.gold)
        context, corpus_examples = corpus_problem(corpus)
        examples.extend(corpus_examples)
    if not examples:
        raise LogicError("nothing to learn from: no examples in mode file or corpus")
    on_improve = _solver_printer() if args.verbose_solver else None
    started = time.monotonic()
    result = learn(
        mode_rules, examples, context, bias,
        pr=args.pr, budget_s=args.budget, on_improve=on_improve,
    )
    elapsed = time.monotonic() - started
    ind = result.induction
    hypothesis_text = "".join(f"{r}\n" for r in ind.hypothesis.rules)
    total_weight = sum(e.weight for e in examples)
    report = {
        "so": ind.so,
        "upper_bound": ind.upper_bound,
        "lower_bound": ind.lower_bound,
        "covered": ind.covered_weight,
        "uncovered": total_weight - ind.covered_weight,
        "elapsed_s": elapsed,
        "pr": args.pr,
    }
    if args.out is not None:
        _emit(hypothesis_text, args.out)
        _emit(json.dumps(report, indent=2) + "\n", args.out + ".report.json")
    else:
        sys.stdout.write(hypothesis_text)
        print(json.dumps(report, indent=2), file=sys.stderr)
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    hypothesis = parse_program(_read(args.hypothesis))
    sentences = load_tokens(args.tokens)
    lines = [chunking_text(predict(hypothesis, s), s) for s in sentences]
    _emit("".join(line + "\n" for line in lines), args.out)
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    gold_corpus = load_corpus(args.tokens, args.gold)
    pred_corpus = load_corpus(args.tokens, args.pred)
    triple = corpus_score(
        [score(pc, gc, s) for (s, gc), (_s, pc) in zip(gold_corpus, pred_corpus)]
    )
    payload = {"p": triple.precision, "r": triple.recall, "f1": triple.f1}
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def _compare_f1s(report: dict, path: str) -> list[float]:
    try:
        return [fold["cv"]["f1"] for fold in report["folds"]]
    except (KeyError, TypeError):
        raise LogicError(f"{path} is not a cross-validation report") from None


def cmd_xval(args: argparse.Namespace) -> int:
    corpus = load_corpus(args.tokens, args.gold)
    test_corpus = None
    if args.test_tokens is not None:
        test_corpus = load_corpus(args.test_tokens, args.test_gold)
    mode_text = _read(args.mode) if args.mode is not None else DEFAULT_MODE
    on_improve = None
    if args.verbose_solver:
        printers = {}

        def on_improve(fold: int, elapsed: float, upper: int, lower: int) -> None:
            printers.setdefault(fold, _solver_printer(f"[fold {fold}] "))(
                elapsed, upper, lower
            )

    started = time.monotonic()
    folds, summary = cross_validate(
        corpus,
        args.folds,
        pr=args.pr,
        budget_s=args.budget,
        test_corpus=test_corpus,
        mode_text=mode_text,
        shuffle_seed=args.shuffle_seed,
        on_improve=on_improve,
    )
    elapsed = time.monotonic() - started
    report = report_dict(folds, summary, args.pr, args.budget, elapsed)
    text = json.dumps(report, indent=2) + "\n"
    if args.out is not None:
        _emit(text, args.out)
    else:
        sys.stdout.write(text)
    print(f"CV F1 {summary.cv_f1_mean:.4f} +- {summary.cv_f1_std:.4f}")
    if summary.test_f1_mean is not None:
        print(f"Test F1 {summary.test_f1_mean:.4f} +- {summary.test_f1_std:.4f}")
    if args.compare is not None:
        ours = [f.cv_score.f1 for f in folds]
        other_report = json.loads(_read(args.compare))
        theirs = _compare_f1s(other_report, args.compare)
        if len(theirs) != len(ours):
            raise LogicError(
                f"cannot pair {len(ours)} folds with {len(theirs)} in {args.compare}"
            )
        t = paired_t_test_one_tailed(ours, theirs)
        flag = " (degenerate)" if t.degenerate else ""
        print(f"t = {t.t:.4f}, p = {t.p:.6f}{flag}")
    return 0


_COMMANDS = {
    "learn": cmd_learn,
    "predict": cmd_predict,
    "score": cmd_score,
    "xval": cmd_xval,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate(parser, args)
    try:
        return _COMMANDS[args.command](args)
    except json.JSONDecodeError as exc:
        print(f"error: malformed JSON: {exc}", file=sys.stderr)
        return 2
    except (LogicError, CorpusError, ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
