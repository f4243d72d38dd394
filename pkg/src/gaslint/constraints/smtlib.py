"""SMT-LIB v2 (QF_BV) rendering and an external solver process wrapper."""

from __future__ import annotations

import logging
import os
import re
import shlex
import subprocess
from dataclasses import dataclass, field
from typing import Iterable

from .terms import WORD, Const, Op, Sym, Term, free_symbols

log = logging.getLogger(__name__)

_BINOPS = {
    "add": "bvadd", "sub": "bvsub", "mul": "bvmul",
    "and": "bvand", "or": "bvor", "xor": "bvxor",
}
_CMPS = {"lt": "bvult", "gt": "bvugt", "slt": "bvslt", "sgt": "bvsgt"}


def _quote(name: str) -> str:
    return "|" + name.replace("|", "_").replace("\\", "_") + "|"


class _Renderer:
    def __init__(self, width: int) -> None:
        self.width = width
        self.abstractions: dict[Term, str] = {}
        self.memo: dict[Term, str] = {}

    def lit(self, v: int) -> str:
        return f"(_ bv{v % (1 << self.width)} {self.width})"

    def bool_to_bv(self, cond: str) -> str:
        return f"(ite {cond} {self.lit(1)} {self.lit(0)})"

    def render(self, t: Term) -> str:
        if isinstance(t, Const):
            return self.lit(t.value)
        if isinstance(t, Sym):
            return _quote(t.name)
        s = self.memo.get(t)
        if s is None:
            s = self._render_op(t)  # type: ignore[arg-type]
            self.memo[t] = s
        return s

    def _abstract(self, t: Term) -> str:
        name = self.abstractions.get(t)
        if name is None:
            name = f"|abs!{len(self.abstractions)}|"
            self.abstractions[t] = name
        return name

    def _render_op(self, t: Op) -> str:
        w = self.width
        zero = self.lit(0)
        r = [self.render(a) for a in t.args] if t.op != "exp" else []
        op = t.op
        if op in _BINOPS:
            return f"({_BINOPS[op]} {r[0]} {r[1]})"
        if op in _CMPS:
            return self.bool_to_bv(f"({_CMPS[op]} {r[0]} {r[1]})")
        if op == "eq":
            return self.bool_to_bv(f"(= {r[0]} {r[1]})")
        if op == "iszero":
            return self.bool_to_bv(f"(= {r[0]} {zero})")
        if op == "not":
            return f"(bvnot {r[0]})"
        if op == "div":
            return f"(ite (= {r[1]} {zero}) {zero} (bvudiv {r[0]} {r[1]}))"
        if op == "mod":
            return f"(ite (= {r[1]} {zero}) {zero} (bvurem {r[0]} {r[1]}))"
        if op in ("addmod", "mulmod"):
            ext = 1 if op == "addmod" else w
            a, b, n = (f"((_ zero_extend {ext}) {x})" for x in r)
            inner = "bvadd" if op == "addmod" else "bvmul"
            body = f"((_ extract {w - 1} 0) (bvurem ({inner} {a} {b}) {n}))"
            return f"(ite (= {r[2]} {zero}) {zero} {body})"
        if op == "exp":
            base, expo = t.args
            if isinstance(expo, Const) and expo.value <= 16:
                acc = self.lit(1)
                b = self.render(base)
                for _ in range(expo.value):
                    acc = f"(bvmul {acc} {b})"
                return acc
            # over-approximation: unsat answers stay sound, sat witnesses get re-checked
            return self._abstract(t)
        if op == "byte":
            i, x = r
            nbytes = w // 8
            shift = f"(bvmul (bvsub {self.lit(nbytes - 1)} {i}) {self.lit(8)})"
            val = f"(bvand (bvlshr {x} {shift}) {self.lit(0xFF)})"
            return f"(ite (bvult {i} {self.lit(nbytes)}) {val} {zero})"
        if op == "shl":
            return f"(bvshl {r[1]} {r[0]})"
        if op == "shr":
            return f"(bvlshr {r[1]} {r[0]})"
        if op == "ite":
            return f"(ite (not (= {r[0]} {zero})) {r[1]} {r[2]})"
        raise ValueError(f"cannot render operator {op}")


def render_script(constraints: Iterable, width: int = WORD, get_values: bool = False) -> str:
    """Render constraints to an SMT-LIB script.

    Each constraint must expose ``term`` and ``polarity`` (True asserts the
    term is nonzero, False asserts it is zero).
    """
    cs = sorted(constraints, key=lambda c: (repr(c.term), c.polarity))
    rnd = _Renderer(width)
    syms: set[str] = set()
    for c in cs:
        syms.update(s.name for s in free_symbols(c.term))
    asserts = []
    for c in cs:
        body = f"(= {rnd.render(c.term)} {rnd.lit(0)})"
        asserts.append(f"(assert (not {body}))" if c.polarity else f"(assert {body})")
    lines = ["(set-logic QF_BV)"]
    names = sorted(syms)
    lines += [f"(declare-fun {_quote(n)} () (_ BitVec {width}))" for n in names]
    lines += [f"(declare-fun {a} () (_ BitVec {width}))" for a in sorted(rnd.abstractions.values())]
    lines += asserts
    lines.append("(check-sat)")
    if get_values and names:
        lines.append(f"(get-value ({' '.join(_quote(n) for n in names)}))")
    return "\n".join(lines) + "\n"


_VALUE_RE = re.compile(r"\(\s*\|?([^\s|()]+)\|?\s+(#x[0-9a-fA-F]+|#b[01]+|\(_\s+bv\d+\s+\d+\))\s*\)")


def _parse_bv(text: str) -> int:
    if text.startswith("#x"):
        return int(text[2:], 16)
    if text.startswith("#b"):
        return int(text[2:], 2)
    return int(text.split()[1][2:])


class SolverError(RuntimeError):
    pass


@dataclass
class SolverConfig:
    """How to reach an external SMT solver reading SMT-LIB on stdin."""

    command: list[str] = field(default_factory=list)
    timeout: float = 1.0

    @classmethod
    def from_cli(cls, exe: str, timeout: float = 1.0) -> "SolverConfig":
        cmd = shlex.split(exe)
        if len(cmd) == 1 and os.path.basename(cmd[0]).startswith("z3"):
            cmd += ["-in", "-smt2"]
        return cls(cmd, timeout)


@dataclass
class SolverAnswer:
    status: str  # sat, unsat, unknown
    model: dict[str, int]


def run_solver(script: str, config: SolverConfig) -> SolverAnswer:
    """Run the configured solver on a script. Raises SolverError on failure."""
    try:
        proc = subprocess.run(
            config.command, input=script, capture_output=True, text=True,
            timeout=config.timeout,
        )
    except subprocess.TimeoutExpired:
        return SolverAnswer("unknown", {})
    except OSError as exc:
        raise SolverError(f"cannot start solver: {exc}") from exc
    out = proc.stdout.strip()
    if not out:
        raise SolverError(f"solver produced no output (exit {proc.returncode}): {proc.stderr.strip()[:200]}")
    head, _, rest = out.partition("\n")
    head = head.strip()
    if head not in ("sat", "unsat", "unknown"):
        raise SolverError(f"unexpected solver output: {head[:200]}")
    model = {}
    if head == "sat":
        model = {m.group(1): _parse_bv(m.group(2)) for m in _VALUE_RE.finditer(rest)}
    return SolverAnswer(head, model)
