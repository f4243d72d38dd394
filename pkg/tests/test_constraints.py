import random
import subprocess

import numpy as np
import pytest
from conftest import Z3, needs_z3
from hypothesis import given, settings
from hypothesis import strategies as st
from shadow import ENV, random_constraints, random_term, satisfiable, vec_eval

from gaslint.constraints import (
    BUDGET_EXHAUSTED,
    BUILTIN_RULES,
    CONSTANT_FOLD,
    EXTERNAL_SOLVER,
    Const,
    Constraint,
    FeasibilityChecker,
    Op,
    SolverConfig,
    Sym,
    assert_false,
    assert_true,
    check_feasible,
    emit_smtlib,
    mk,
    normalize,
    simplify,
)
from gaslint.constraints.smtlib import run_solver
from gaslint.constraints.terms import evaluate, free_symbols, is_boolean, substitute

x, y = Sym("x"), Sym("y")
M = (1 << 256) - 1


# --- terms and simplification -----------------------------------------------------


def test_constants_reduced_mod_word():
    assert Const(1 << 256).value == 0
    assert Const(-1).value == M
    assert Const(300, 8).value == 44


def test_terms_hash_structurally():
    assert Op("add", x, Const(1)) == Op("add", Sym("x"), Const(1))
    assert len({Op("add", x, Const(1)), Op("add", Sym("x"), Const(1))}) == 1


def test_bad_arity_rejected():
    with pytest.raises(ValueError):
        Op("add", x)


def test_simplify_examples():
    assert simplify(Op("add", Const(M), Const(1))) == Const(0)
    assert simplify(Op("lt", Const(5), Const(20))) == Const(1)
    assert simplify(Op("xor", x, x)) == Const(0)
    assert simplify(Op("add", x, Const(0))) == x
    assert simplify(Op("mul", x, Const(1))) == x
    assert simplify(Op("div", x, Const(0))) == Const(0)
    assert simplify(Op("mod", x, Const(0))) == Const(0)


def test_double_iszero_only_collapses_booleans():
    b = Op("lt", x, y)
    assert simplify(Op("iszero", Op("iszero", b))) == b
    assert simplify(Op("iszero", Op("iszero", x))) != x


def test_comparisons_are_boolean():
    for op in ("lt", "gt", "slt", "sgt", "eq", "iszero"):
        t = Op(op, x, y) if op != "iszero" else Op(op, x)
        assert is_boolean(t)
        for xv, yv in [(0, 0), (1, M), (M, 1), (5, 5)]:
            assert evaluate(t, {"x": xv, "y": yv}) in (0, 1)


def test_evaluate_signed_and_byte():
    assert evaluate(Op("slt", Const(M), Const(0)), {}) == 1
    assert evaluate(Op("byte", Const(31), Const(0xABCD)), {}) == 0xCD
    assert evaluate(Op("byte", Const(32), Const(0xABCD)), {}) == 0
    assert evaluate(Op("shl", Const(8), Const(1)), {}) == 256


def test_substitute_and_free_symbols():
    t = Op("add", x, Op("mul", y, Const(2)))
    assert free_symbols(t) == {x, y}
    assert evaluate(simplify(substitute(t, {y: Const(3)})), {"x": 1}) == 7


def test_mk_moves_constants_right():
    assert mk("add", Const(1), x) == mk("add", x, Const(1))


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=2**32))
def test_simplify_sound_in_shadow_domain(seed):
    t = random_term(random.Random(seed), depth=4)
    s = simplify(t, 8)
    assert np.array_equal(vec_eval(t), vec_eval(s))


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=2**32))
def test_simplify_sound_at_full_width(seed):
    rng = random.Random(seed)
    t = random_term(rng, depth=4)
    s = simplify(t)
    for _ in range(20):
        env = {"x": rng.choice([0, 1, M, rng.getrandbits(256)]), "y": rng.getrandbits(256)}
        assert evaluate(t, env) == evaluate(s, env)


# --- feasibility -------------------------------------------------------------------


def test_feasible_by_constant_fold():
    r = check_feasible([assert_true(Op("gt", Const(5), Const(1)))])
    assert r.feasible and r.source == CONSTANT_FOLD


def test_irreflexive_comparison_infeasible():
    r = check_feasible([assert_true(Op("gt", x, x))])
    assert r.infeasible and r.source == BUILTIN_RULES


def test_and_zero_eq_one_infeasible():
    cs = [assert_true(Op("eq", Op("and", x, Const(0)), Const(1)))]
    assert check_feasible(cs).infeasible
    narrow = [Constraint(Op("eq", Op("and", x, Const(0, 8)), Const(1, 8)))]
    assert not satisfiable(narrow)


def test_witness_is_returned_and_valid():
    cs = [assert_true(Op("gt", x, Const(1)))]
    r = check_feasible(cs)
    assert r.feasible and all(c.holds(r.witness) for c in cs)


def test_contradictory_polarities():
    t = Op("lt", x, y)
    assert check_feasible([assert_true(t), assert_false(t)]).infeasible


def test_equality_substitution():
    cs = [assert_true(Op("eq", x, Const(4))), assert_true(Op("gt", x, Const(9)))]
    assert check_feasible(cs).infeasible


def test_range_contradiction():
    # x < 10 and x > 20
    cs = [assert_true(Op("gt", Const(10), x)), assert_true(Op("gt", x, Const(20)))]
    assert check_feasible(cs).infeasible
    # x > 5 and x < 7 leaves exactly 6
    r = check_feasible([assert_true(Op("gt", x, Const(5))), assert_true(Op("lt", x, Const(7)))])
    assert r.feasible and r.witness == {"x": 6}
    # x >= 3 and x <= 3 is satisfiable: the negated forms are inclusive
    cs = [assert_false(Op("lt", x, Const(3))), assert_false(Op("gt", x, Const(3)))]
    assert not check_feasible(cs).infeasible


_cmp_against_const = st.tuples(
    st.sampled_from(["lt", "gt", "eq"]), st.booleans(), st.integers(0, 255), st.booleans()
)


@settings(max_examples=300, deadline=None)
@given(st.lists(_cmp_against_const, min_size=1, max_size=4))
def test_range_rule_sound_in_shadow_domain(parts):
    cs = []
    for op, const_left, k, pol in parts:
        args = (Const(k, 8), x) if const_left else (x, Const(k, 8))
        cs.append(Constraint(Op(op, *args), pol))
    r = FeasibilityChecker(width=8).check(cs)
    if r.infeasible:
        assert not satisfiable(cs)
    if r.witness is not None:
        assert all(c.holds(r.witness, 8) for c in cs)


def test_assert_false_is_iszero():
    t = Op("lt", x, Const(3))
    assert normalize(assert_false(t)) == normalize(assert_true(Op("iszero", t)))


def test_unknown_without_solver():
    # x * x == 49 has the witness 7, but not among boundary values
    cs = [assert_true(Op("eq", Op("mul", x, x), Const(49)))]
    r = FeasibilityChecker().check(cs)
    assert r.verdict in ("unknown", "feasible")
    if r.feasible:
        assert all(c.holds(r.witness) for c in cs)


def test_cache_returns_same_object():
    ch = FeasibilityChecker()
    cs = [assert_true(Op("gt", x, Const(1)))]
    assert ch.check(cs) is ch.check(list(reversed(cs)))


def test_small_feasibility_soundness_sample():
    rng = random.Random(7)
    ch = FeasibilityChecker(width=8)
    for _ in range(150):
        cs = random_constraints(rng)
        r = ch.check(cs)
        if r.infeasible:
            assert not satisfiable(cs), cs
        if r.witness is not None:
            assert all(c.holds(r.witness, 8) for c in cs), cs


def test_budget_exhaustion_reports_unknown():
    cs = [assert_true(Op("eq", Op("mul", x, y), Const(12345677)))]
    r = FeasibilityChecker(witness_tries=10_000).check(cs, budget=0.0)
    assert r.verdict == "unknown" and r.source in (BUDGET_EXHAUSTED, BUILTIN_RULES)


# --- SMT-LIB ---------------------------------------------------------------------------


def test_emit_empty():
    text = emit_smtlib([])
    assert text == "(set-logic QF_BV)\n(check-sat)\n"


def test_emit_is_deterministic_and_sorted():
    cs = [assert_true(Op("gt", y, Const(1))), assert_false(Op("eq", x, Const(2)))]
    a = emit_smtlib(cs)
    b = emit_smtlib(list(reversed(cs)))
    assert a == b
    decls = [line for line in a.splitlines() if line.startswith("(declare-fun")]
    assert decls == sorted(decls) and len(decls) == 2
    assert "bvugt" in a and "(_ BitVec 256)" in a
    assert a.count("(assert") == 2


def test_emit_width_parameter():
    assert "(_ BitVec 8)" in emit_smtlib([assert_true(Op("gt", x, Const(1, 8)))], width=8)


@needs_z3
@pytest.mark.parametrize(
    "cs,expected",
    [
        ([], "sat"),
        ([assert_true(Op("gt", x, Const(1)))], "sat"),
        ([assert_true(Op("gt", x, x))], "unsat"),
        ([assert_true(Op("eq", Op("and", x, Const(0)), Const(1)))], "unsat"),
    ],
)
def test_z3_answers(cs, expected):
    out = subprocess.run([Z3, "-in", "-smt2"], input=emit_smtlib(cs), capture_output=True, text=True, timeout=30)
    assert out.stdout.split()[0] == expected


@needs_z3
def test_external_solver_proves_infeasibility():
    # 2x is even, so 2x == 3 has no solution; the built-in search cannot show that
    cs = [assert_true(Op("eq", Op("mul", x, Const(2)), Const(3)))]
    assert FeasibilityChecker().check(cs).verdict == "unknown"
    r = FeasibilityChecker(solver=SolverConfig.from_cli(Z3, 10.0)).check(cs)
    assert r.infeasible and r.source == EXTERNAL_SOLVER


@needs_z3
def test_external_solver_witness_is_revalidated():
    cs = [assert_true(Op("eq", Op("add", x, Const(1000)), Const(77777)))]
    r = FeasibilityChecker(solver=SolverConfig.from_cli(Z3, 10.0), witness_tries=1).check(cs)
    assert r.feasible
    assert all(c.holds(r.witness) for c in cs)


@needs_z3
def test_solver_agrees_with_shadow_enumeration():
    rng = random.Random(3)
    cfg = SolverConfig.from_cli(Z3, 10.0)
    from gaslint.constraints.smtlib import render_script

    for _ in range(25):
        cs = random_constraints(rng)
        ans = run_solver(render_script(cs, 8), cfg)
        if ans.status != "unknown":
            assert (ans.status == "sat") == satisfiable(cs), cs


def test_missing_solver_degrades_to_unknown():
    ch = FeasibilityChecker(solver=SolverConfig(["/nonexistent/solver-binary"], 1.0))
    cs = [assert_true(Op("eq", Op("mul", x, Const(2)), Const(3)))]
    r = ch.check(cs)
    assert r.verdict == "unknown" and r.source == EXTERNAL_SOLVER
    assert ch.diagnostics


def test_shadow_env_covers_all_pairs():
    assert len(ENV["x"]) == 65536
