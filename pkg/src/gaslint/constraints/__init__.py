"""Bitvector terms, simplification and branch feasibility."""

from .feasibility import (
    BUDGET_EXHAUSTED,
    BUILTIN_RULES,
    CONSTANT_FOLD,
    EXTERNAL_SOLVER,
    FEASIBLE,
    INFEASIBLE,
    UNKNOWN,
    Constraint,
    Feasibility,
    FeasibilityChecker,
    assert_false,
    assert_true,
    check_feasible,
    emit_smtlib,
    normalize,
)
from .simplify import mk, simplify
from .smtlib import SolverConfig, SolverError, run_solver
from .terms import ONE, WORD, ZERO, Const, Op, Sym, Term, const, evaluate, free_symbols, is_boolean

__all__ = [
    "BUDGET_EXHAUSTED", "BUILTIN_RULES", "CONSTANT_FOLD", "EXTERNAL_SOLVER",
    "FEASIBLE", "INFEASIBLE", "UNKNOWN",
    "Constraint", "Feasibility", "FeasibilityChecker", "assert_false", "assert_true",
    "check_feasible", "emit_smtlib", "normalize", "mk", "simplify",
    "SolverConfig", "SolverError", "run_solver",
    "ONE", "WORD", "ZERO", "Const", "Op", "Sym", "Term", "const", "evaluate",
    "free_symbols", "is_boolean",
]
