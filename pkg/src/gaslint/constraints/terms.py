"""Immutable bitvector expression trees.

Terms are width-agnostic: the word width (256 for the EVM, smaller for shadow
checks) is supplied when a term is simplified or evaluated.
"""

from __future__ import annotations

from typing import Iterator, Mapping

WORD = 256

# operator name -> arity
ARITY: dict[str, int] = {
    "add": 2, "sub": 2, "mul": 2, "div": 2, "mod": 2,
    "addmod": 3, "mulmod": 3, "exp": 2,
    "and": 2, "or": 2, "xor": 2, "not": 1,
    "lt": 2, "gt": 2, "slt": 2, "sgt": 2, "eq": 2, "iszero": 1,
    "byte": 2, "shl": 2, "shr": 2,
    "ite": 3,
}
COMMUTATIVE = frozenset({"add", "mul", "and", "or", "xor", "eq"})
PREDICATES = frozenset({"lt", "gt", "slt", "sgt", "eq", "iszero"})


class Term:
    __slots__ = ("_hash",)

    def __hash__(self) -> int:
        return self._hash

    def is_const(self) -> bool:
        return False

    def children(self) -> tuple[Term, ...]:
        return ()


class Const(Term):
    __slots__ = ("value",)

    def __init__(self, value: int, width: int = WORD) -> None:
        self.value = value % (1 << width)
        self._hash = hash(("c", self.value))

    def is_const(self) -> bool:
        return True

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Const) and other.value == self.value

    def __repr__(self) -> str:
        return f"{self.value:#x}" if self.value > 9 else str(self.value)

    __hash__ = Term.__hash__


class Sym(Term):
    """A free symbol. ``origin`` names what produced it (calldata, sload, ...)."""

    __slots__ = ("name", "origin")

    def __init__(self, name: str, origin: str = "") -> None:
        self.name = name
        self.origin = origin
        self._hash = hash(("s", name))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Sym) and other.name == self.name

    def __repr__(self) -> str:
        return self.name

    __hash__ = Term.__hash__


class Op(Term):
    __slots__ = ("op", "args", "_syms")

    def __init__(self, op: str, *args: Term) -> None:
        if ARITY.get(op) != len(args):
            raise ValueError(f"bad operator application {op}/{len(args)}")
        self.op = op
        self.args = args
        self._hash = hash((op, args))
        self._syms: frozenset[Sym] | None = None

    def children(self) -> tuple[Term, ...]:
        return self.args

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return (
            isinstance(other, Op)
            and other._hash == self._hash
            and other.op == self.op
            and other.args == self.args
        )

    def __repr__(self) -> str:
        return f"{self.op}({', '.join(map(repr, self.args))})"

    __hash__ = Term.__hash__


def const(value: int, width: int = WORD) -> Const:
    return Const(value, width)


ZERO = Const(0)
ONE = Const(1)


def free_symbols(term: Term) -> frozenset[Sym]:
    if isinstance(term, Sym):
        return frozenset((term,))
    if isinstance(term, Const):
        return frozenset()
    assert isinstance(term, Op)
    if term._syms is None:
        acc: frozenset[Sym] = frozenset()
        for a in term.args:
            acc |= free_symbols(a)
        term._syms = acc
    return term._syms


def is_boolean(term: Term) -> bool:
    """True when the term's value is always 0 or 1."""
    if isinstance(term, Const):
        return term.value in (0, 1)
    if isinstance(term, Op):
        if term.op in PREDICATES:
            return True
        if term.op in ("and", "or", "xor"):
            return all(is_boolean(a) for a in term.args)
        if term.op == "ite":
            return is_boolean(term.args[1]) and is_boolean(term.args[2])
    return False


def subterms(term: Term) -> Iterator[Term]:
    seen: set[Term] = set()
    todo = [term]
    while todo:
        t = todo.pop()
        if t in seen:
            continue
        seen.add(t)
        yield t
        todo.extend(t.children())


def depth(term: Term) -> int:
    if not isinstance(term, Op):
        return 0
    return 1 + max(depth(a) for a in term.args)


# --- concrete semantics ---------------------------------------------------------


def _signed(v: int, width: int) -> int:
    return v - (1 << width) if v >> (width - 1) else v


def apply_op(op: str, vals: tuple[int, ...], width: int = WORD) -> int:
    """Concrete EVM semantics of an operator over ``width``-bit words."""
    mask = (1 << width) - 1
    if op == "add":
        return (vals[0] + vals[1]) & mask
    if op == "sub":
        return (vals[0] - vals[1]) & mask
    if op == "mul":
        return (vals[0] * vals[1]) & mask
    if op == "div":
        return 0 if vals[1] == 0 else vals[0] // vals[1]
    if op == "mod":
        return 0 if vals[1] == 0 else vals[0] % vals[1]
    if op == "addmod":
        return 0 if vals[2] == 0 else (vals[0] + vals[1]) % vals[2]
    if op == "mulmod":
        return 0 if vals[2] == 0 else (vals[0] * vals[1]) % vals[2]
    if op == "exp":
        return pow(vals[0], vals[1], 1 << width)
    if op == "and":
        return vals[0] & vals[1]
    if op == "or":
        return vals[0] | vals[1]
    if op == "xor":
        return vals[0] ^ vals[1]
    if op == "not":
        return vals[0] ^ mask
    if op == "lt":
        return int(vals[0] < vals[1])
    if op == "gt":
        return int(vals[0] > vals[1])
    if op == "slt":
        return int(_signed(vals[0], width) < _signed(vals[1], width))
    if op == "sgt":
        return int(_signed(vals[0], width) > _signed(vals[1], width))
    if op == "eq":
        return int(vals[0] == vals[1])
    if op == "iszero":
        return int(vals[0] == 0)
    if op == "byte":
        nbytes = width // 8
        i, x = vals
        if i >= nbytes:
            return 0
        return (x >> (8 * (nbytes - 1 - i))) & 0xFF
    if op == "shl":
        return (vals[1] << vals[0]) & mask if vals[0] < width else 0
    if op == "shr":
        return vals[1] >> vals[0] if vals[0] < width else 0
    if op == "ite":
        return vals[1] if vals[0] else vals[2]
    raise ValueError(f"unknown operator {op}")


def evaluate(term: Term, env: Mapping[str, int], width: int = WORD) -> int:
    """Evaluate a term under an assignment of symbol names to values.

    Symbols missing from ``env`` evaluate to 0.
    """
    mask = (1 << width) - 1
    memo: dict[Term, int] = {}

    def go(t: Term) -> int:
        if isinstance(t, Const):
            return t.value & mask
        if isinstance(t, Sym):
            return env.get(t.name, 0) & mask
        v = memo.get(t)
        if v is None:
            assert isinstance(t, Op)
            if t.op == "ite":
                v = go(t.args[1]) if go(t.args[0]) else go(t.args[2])
            else:
                v = apply_op(t.op, tuple(go(a) for a in t.args), width)
            memo[t] = v
        return v

    return go(term)


def substitute(term: Term, mapping: Mapping[Term, Term]) -> Term:
    """Structurally replace subterms; does not simplify the result."""
    if not mapping:
        return term
    memo: dict[Term, Term] = {}

    def go(t: Term) -> Term:
        hit = mapping.get(t)
        if hit is not None:
            return hit
        if not isinstance(t, Op):
            return t
        r = memo.get(t)
        if r is None:
            args = tuple(go(a) for a in t.args)
            r = t if all(x is y for x, y in zip(args, t.args)) else Op(t.op, *args)
            memo[t] = r
        return r

    return go(term)
