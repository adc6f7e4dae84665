"""Rule learning by abduction, deduction, generalisation, and induction.

The pipeline abduces ground head atoms that explain the examples, deduces
one ground rule per abduced atom, generalises those rules under a mode bias
with support counting, and then searches for the smallest sub-rule selection
covering the most example weight within a time budget.  A sentence-chunking
application and an evaluation harness (precision/recall/F1, cross-validation,
paired t-test) are included.
"""

from .logic import (
    ANON,
    Atom,
    Constant,
    FactBase,
    Literal,
    LogicError,
    ParseError,
    Rule,
    UnsafeRuleError,
    Variable,
    parse_program,
    print_program,
    print_rule,
)
from .evaluator import NotStratifiedError, Stratification, evaluate, holds, stratify
from .modes import (
    ExampleSpec,
    GeneralRule,
    ModeBias,
    ModeDecl,
    ModeError,
    aggregate_support,
    canonicalize,
    generalise,
    parse_mode_file,
)
from .kernel import AbductionResult, GroundKernel, abduce, deduce, prune_kernel
from .induction import HypothesisCandidate, InductionResult, cost, induce
from .pipeline import DEFAULT_BUDGET_S, LearnResult, learn
from .chunking import (
    BACKGROUND,
    DEFAULT_MODE,
    Chunking,
    CorpusError,
    Sentence,
    Token,
    chunking_text,
    corpus_problem,
    load_corpus,
    load_tokens,
    make_examples,
    mangle_tag,
    predict,
    sentence_facts,
    sentence_facts_text,
)
from .harness import (
    FoldResult,
    ScoreTriple,
    TTestResult,
    XvalSummary,
    corpus_score,
    cross_validate,
    match_count,
    paired_t_test_one_tailed,
    report_dict,
    score,
    score_corpus,
)

__version__ = "0.1.0"

__all__ = [
    "ANON",
    "BACKGROUND",
    "DEFAULT_BUDGET_S",
    "DEFAULT_MODE",
    "AbductionResult",
    "Atom",
    "Chunking",
    "Constant",
    "CorpusError",
    "ExampleSpec",
    "FactBase",
    "FoldResult",
    "GeneralRule",
    "GroundKernel",
    "HypothesisCandidate",
    "InductionResult",
    "LearnResult",
    "Literal",
    "LogicError",
    "ModeBias",
    "ModeDecl",
    "ModeError",
    "NotStratifiedError",
    "ParseError",
    "Rule",
    "ScoreTriple",
    "Sentence",
    "Stratification",
    "TTestResult",
    "Token",
    "UnsafeRuleError",
    "Variable",
    "XvalSummary",
    "abduce",
    "aggregate_support",
    "canonicalize",
    "chunking_text",
    "corpus_problem",
    "corpus_score",
    "cost",
    "cross_validate",
    "deduce",
    "evaluate",
    "generalise",
    "holds",
    "induce",
    "learn",
    "load_corpus",
    "load_tokens",
    "make_examples",
    "mangle_tag",
    "match_count",
    "paired_t_test_one_tailed",
    "parse_mode_file",
    "parse_program",
    "predict",
    "print_program",
    "print_rule",
    "prune_kernel",
    "report_dict",
    "score",
    "score_corpus",
    "sentence_facts",
    "sentence_facts_text",
    "stratify",
]
