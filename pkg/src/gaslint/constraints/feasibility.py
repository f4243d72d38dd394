"""Path constraints and the branch feasibility oracle."""

from __future__ import annotations

import itertools
import logging
import random
import threading
import time
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .simplify import simplify
from .smtlib import SolverConfig, SolverError, render_script, run_solver
from .terms import WORD, Const, Op, Sym, Term, evaluate, free_symbols, is_boolean, subterms, substitute

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Constraint:
    """``term != 0`` when polarity is True, ``term == 0`` otherwise."""

    term: Term
    polarity: bool = True

    def holds(self, env: Mapping[str, int], width: int = WORD) -> bool:
        return bool(evaluate(self.term, env, width)) == self.polarity

    def negated(self) -> "Constraint":
        return Constraint(self.term, not self.polarity)


def assert_true(term: Term) -> Constraint:
    return Constraint(term, True)


def assert_false(term: Term) -> Constraint:
    return Constraint(term, False)


FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
UNKNOWN = "unknown"

CONSTANT_FOLD = "constant_fold"
BUILTIN_RULES = "builtin_rules"
EXTERNAL_SOLVER = "external_solver"
BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass(frozen=True)
class Feasibility:
    verdict: str
    source: str
    witness: Mapping[str, int] | None = None

    @property
    def feasible(self) -> bool:
        return self.verdict == FEASIBLE

    @property
    def infeasible(self) -> bool:
        return self.verdict == INFEASIBLE


def normalize(c: Constraint, width: int = WORD) -> Constraint:
    """Simplify and peel ``iszero`` wrappers by flipping polarity."""
    t = simplify(c.term, width)
    pol = c.polarity
    while isinstance(t, Op) and t.op == "iszero":
        t = t.args[0]
        pol = not pol
    return Constraint(t, pol)


def emit_smtlib(constraints: Iterable[Constraint], width: int = WORD) -> str:
    """Deterministic QF_BV script: declarations, one assert per constraint, check-sat."""
    return render_script(list(constraints), width)


@dataclass
class FeasibilityChecker:
    """Built-in constraint reasoning with an optional external solver fallback.

    Verdicts are cached by the constraint set. The cache is guarded by a lock so
    one checker may be shared between concurrent analyses.
    """

    solver: SolverConfig | None = None
    width: int = WORD
    witness_tries: int = 512
    seed: int = 0
    cache_size: int = 1 << 16
    _cache: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)
    diagnostics: list[str] = field(default_factory=list, repr=False)

    def check(self, constraints: Iterable[Constraint], budget: float | None = None) -> Feasibility:
        key = frozenset(constraints)
        with self._lock:
            hit = self._cache.get(key)
            # witnesses of cached one-smaller subsets seed the search (path prefixes)
            hints = []
            if hit is None and len(key) > 1:
                for c in key:
                    sub = self._cache.get(key - {c})
                    if sub is not None and sub.witness is not None:
                        hints.append((sub.witness, c))
                        if len(hints) >= 4:
                            break
        if hit is not None:
            return hit
        res = self._check(key, budget, hints)
        with self._lock:
            if len(self._cache) >= self.cache_size:
                self._cache.clear()
            self._cache[key] = res
        return res

    # --- internals ---------------------------------------------------------

    def _check(self, originals: frozenset[Constraint], budget: float | None,
               hints: list[tuple[Mapping[str, int], Constraint]] = ()) -> Feasibility:
        w = self.width
        deadline = None if budget is None else time.monotonic() + budget
        ordered = sorted(originals, key=lambda c: (repr(c.term), c.polarity))
        cs = [normalize(c, w) for c in ordered]

        for orig, c in zip(ordered, cs):
            if isinstance(c.term, Const) and bool(c.term.value) != c.polarity:
                src = CONSTANT_FOLD if not free_symbols(orig.term) else BUILTIN_RULES
                return Feasibility(INFEASIBLE, src)
        if all(isinstance(c.term, Const) for c in cs):
            src = CONSTANT_FOLD if not any(free_symbols(c.term) for c in ordered) else BUILTIN_RULES
            return Feasibility(FEASIBLE, src, {})
        cs = [c for c in cs if not isinstance(c.term, Const)]

        # substitute asserted equalities t == c into the other constraints
        for _ in range(4):
            mapping: dict[Term, Term] = {}
            for c in cs:
                for t, v in _equalities(c, w):
                    prev = mapping.get(t)
                    if prev is not None and prev != v:
                        return Feasibility(INFEASIBLE, BUILTIN_RULES)
                    mapping[t] = v
            if not mapping:
                break
            nxt = []
            for c in cs:
                own = {t for t, _ in _equalities(c, w)}
                m = {k: v for k, v in mapping.items() if k not in own}
                nxt.append(normalize(Constraint(substitute(c.term, m), c.polarity), w) if m else c)
            for c in nxt:
                if isinstance(c.term, Const) and bool(c.term.value) != c.polarity:
                    return Feasibility(INFEASIBLE, BUILTIN_RULES)
            nxt = [c for c in nxt if not isinstance(c.term, Const)]
            if nxt == cs:
                break
            cs = nxt

        by_term: dict[Term, bool] = {}
        for c in cs:
            if by_term.get(c.term, c.polarity) != c.polarity:
                return Feasibility(INFEASIBLE, BUILTIN_RULES)
            by_term[c.term] = c.polarity
        if _bounds_conflict(cs, w):
            return Feasibility(INFEASIBLE, BUILTIN_RULES)

        witness = self._search_witness(ordered, deadline, hints)
        if witness is not None:
            return Feasibility(FEASIBLE, BUILTIN_RULES, witness)
        if deadline is not None and time.monotonic() > deadline:
            return Feasibility(UNKNOWN, BUDGET_EXHAUSTED)
        if self.solver is not None:
            return self._external(originals, deadline)
        return Feasibility(UNKNOWN, BUILTIN_RULES)

    def _candidates(self, cs: Iterable[Constraint]) -> list[int]:
        mask = (1 << self.width) - 1
        seeds = {0, 1, 2, mask, mask - 1, 1 << (self.width - 1)}
        for c in cs:
            for t in subterms(c.term):
                if isinstance(t, Const):
                    seeds.update(((t.value - 1) & mask, t.value, (t.value + 1) & mask))
        return sorted(seeds)

    def _assignments(self, syms: list[str], cands: list[int], rng: random.Random) -> Iterable[tuple[int, ...]]:
        if len(cands) ** len(syms) <= self.witness_tries:
            return itertools.product(cands, repeat=len(syms))
        return (tuple(rng.choice(cands) for _ in syms) for _ in range(self.witness_tries))

    def _search_witness(self, cs: list[Constraint], deadline: float | None,
                        hints: Iterable[tuple[Mapping[str, int], Constraint]] = ()) -> dict[str, int] | None:
        """Look for a satisfying assignment among boundary-ish values.

        Each hint is a witness for all constraints but one; only the symbols
        of that remaining constraint are varied around it first.
        """
        syms = sorted({s.name for c in cs for s in free_symbols(c.term)})
        if not syms:
            return None
        cands = self._candidates(cs)
        rng = random.Random(self.seed)
        for base, extra in hints:
            local = sorted(s.name for s in free_symbols(extra.term))
            for vals in self._assignments(local, cands, rng):
                env = {**base, **dict(zip(local, vals))}
                if extra.holds(env, self.width) and all(c.holds(env, self.width) for c in cs):
                    return {k: env.get(k, 0) for k in syms}
        for n, vals in enumerate(self._assignments(syms, cands, rng)):
            env = dict(zip(syms, vals))
            if all(c.holds(env, self.width) for c in cs):
                return env
            if deadline is not None and n % 64 == 0 and time.monotonic() > deadline:
                return None
        return None

    def _external(self, originals: frozenset[Constraint], deadline: float | None) -> Feasibility:
        assert self.solver is not None
        cfg = self.solver
        if deadline is not None:
            cfg = SolverConfig(cfg.command, max(0.05, min(cfg.timeout, deadline - time.monotonic())))
        script = render_script(originals, self.width, get_values=True)
        try:
            ans = run_solver(script, cfg)
        except SolverError as exc:
            log.warning("external solver failed: %s", exc)
            self.diagnostics.append(str(exc))
            return Feasibility(UNKNOWN, EXTERNAL_SOLVER)
        if ans.status == "unsat":
            return Feasibility(INFEASIBLE, EXTERNAL_SOLVER)
        if ans.status == "sat":
            if all(c.holds(ans.model, self.width) for c in originals):
                return Feasibility(FEASIBLE, EXTERNAL_SOLVER, ans.model)
            log.debug("solver model failed re-validation (abstracted terms)")
        return Feasibility(UNKNOWN, EXTERNAL_SOLVER)


def _equalities(c: Constraint, width: int) -> list[tuple[Term, Term]]:
    """Rewrites implied by a single normalized constraint."""
    t = c.term
    if not c.polarity:
        return [(t, Const(0, width))]
    if isinstance(t, Op) and t.op == "eq" and isinstance(t.args[1], Const):
        return [(t.args[0], t.args[1])]
    if is_boolean(t) and not isinstance(t, Const):
        return [(t, Const(1, width))]
    return []


def _bound(c: Constraint, width: int) -> tuple[Term, int, int] | None:
    """Unsigned range ``(term, lo, hi)`` implied by a comparison with a constant."""
    t = c.term
    if not (isinstance(t, Op) and t.op in ("lt", "gt", "eq")):
        return None
    a, b = t.args
    top = (1 << width) - 1
    if t.op == "eq":
        if c.polarity and isinstance(b, Const) and not isinstance(a, Const):
            return a, b.value, b.value
        return None
    if isinstance(b, Const) and not isinstance(a, Const):
        term, k, below = a, b.value, t.op == "lt"
    elif isinstance(a, Const) and not isinstance(b, Const):
        term, k, below = b, a.value, t.op == "gt"
    else:
        return None
    # holds: term < k (below) or term > k; negated: term >= k or term <= k
    if c.polarity:
        return (term, 0, k - 1) if below else (term, k + 1, top)
    return (term, k, top) if below else (term, 0, k)


def _bounds_conflict(cs: Iterable[Constraint], width: int) -> bool:
    """Intersect per-term unsigned ranges; an empty range is a contradiction."""
    ranges: dict[Term, tuple[int, int]] = {}
    for c in cs:
        b = _bound(c, width)
        if b is None:
            continue
        term, lo, hi = b
        plo, phi = ranges.get(term, (0, (1 << width) - 1))
        lo, hi = max(lo, plo), min(hi, phi)
        if lo > hi:
            return True
        ranges[term] = (lo, hi)
    return False


_DEFAULT = FeasibilityChecker()


def check_feasible(constraints: Iterable[Constraint], budget: float | None = 1.0,
                   checker: FeasibilityChecker | None = None) -> Feasibility:
    return (checker or _DEFAULT).check(constraints, budget)

