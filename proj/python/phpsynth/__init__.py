"""Deductive synthesis of small PHP programs from predicate-calculus specifications."""

from ._phpsynth import (
    ProgramError,
    ProgramRuntimeError,
    SearchExhausted,
    SpecError,
    TheoremStore,
    check,
    classify,
    corpus_theorems,
    normalize_program,
    normalize_spec,
    normalize_text,
    oracle,
    run,
    simplify,
    synthesize,
)

__all__ = [
    "ProgramError",
    "ProgramRuntimeError",
    "SearchExhausted",
    "SpecError",
    "TheoremStore",
    "check",
    "classify",
    "corpus_theorems",
    "normalize_program",
    "normalize_spec",
    "normalize_text",
    "oracle",
    "run",
    "simplify",
    "synthesize",
]
