"""Bottom-up term simplification with EVM modular semantics."""

from __future__ import annotations

from .terms import COMMUTATIVE, WORD, Const, Op, Term, apply_op, is_boolean


def mk(op: str, *args: Term, width: int = WORD) -> Term:
    """Build ``op(args)`` assuming the arguments are already simplified."""
    mask = (1 << width) - 1

    if op == "ite":
        c, a, b = args
        if isinstance(c, Const):
            return a if c.value else b
        if a == b:
            return a
        return Op("ite", c, a, b)

    if all(isinstance(a, Const) for a in args):
        return Const(apply_op(op, tuple(a.value for a in args), width), width)  # type: ignore[union-attr]

    if op in COMMUTATIVE and isinstance(args[0], Const):
        args = (args[1], args[0])

    if len(args) == 2:
        x, y = args
        cy = y.value if isinstance(y, Const) else None
        cx = x.value if isinstance(x, Const) else None
        same = x == y

        if op == "add":
            if cy == 0:
                return x
            # (x + c1) + c2  ->  x + (c1 + c2)
            if cy is not None and isinstance(x, Op) and x.op == "add" and isinstance(x.args[1], Const):
                return mk("add", x.args[0], Const(x.args[1].value + cy, width), width=width)
        elif op == "sub":
            if cy == 0:
                return x
            if same:
                return Const(0)
            if cy is not None:
                return mk("add", x, Const(-cy, width), width=width)
        elif op == "mul":
            if cy == 0:
                return Const(0)
            if cy == 1:
                return x
        elif op == "div":
            if cy == 0 or cx == 0:
                return Const(0)
            if cy == 1:
                return x
        elif op == "mod":
            if cy in (0, 1) or cx == 0:
                return Const(0)
        elif op == "exp":
            if cy == 0:
                return Const(1)
            if cy == 1:
                return x
            if cx == 1:
                return Const(1)
        elif op == "and":
            if cy == 0:
                return Const(0)
            if cy == mask or same:
                return x
            if cy == 1 and is_boolean(x):
                return x
        elif op == "or":
            if cy == 0 or same:
                return x
            if cy == mask:
                return Const(mask, width)
        elif op == "xor":
            if same:
                return Const(0)
            if cy == 0:
                return x
        elif op in ("lt", "gt", "slt", "sgt"):
            if same:
                return Const(0)
            if op == "lt" and (cy == 0 or cx == mask):
                return Const(0)
            if op == "gt" and (cx == 0 or cy == mask):
                return Const(0)
        elif op == "eq":
            if same:
                return Const(1)
            if cy is not None:
                # x + c1 == c2  ->  x == c2 - c1
                if isinstance(x, Op) and x.op == "add" and isinstance(x.args[1], Const):
                    return mk("eq", x.args[0], Const(cy - x.args[1].value, width), width=width)
                if cy == 0:
                    return mk("iszero", x, width=width)
                if is_boolean(x):
                    if cy == 1:
                        return x
                    return Const(0)
        elif op == "byte":
            if cx is not None and cx >= width // 8:
                return Const(0)
        elif op in ("shl", "shr"):
            if cx == 0:
                return y
            if cx is not None and cx >= width:
                return Const(0)
        return Op(op, x, y)

    if len(args) == 1:
        (x,) = args
        if op == "not":
            if isinstance(x, Op) and x.op == "not":
                return x.args[0]
        elif op == "iszero":
            if isinstance(x, Op) and x.op == "iszero" and is_boolean(x.args[0]):
                return x.args[0]
        return Op(op, x)

    a, b, n = args
    if op in ("addmod", "mulmod") and isinstance(n, Const) and n.value in (0, 1):
        return Const(0)
    return Op(op, a, b, n)


def simplify(term: Term, width: int = WORD) -> Term:
    """Rebuild ``term`` bottom-up through :func:`mk`.

    The result is semantically equal to the input for every assignment of its
    free symbols at the given width.
    """
    memo: dict[Term, Term] = {}

    def go(t: Term) -> Term:
        if not isinstance(t, Op):
            if isinstance(t, Const) and width != WORD:
                return Const(t.value, width)
            return t
        r = memo.get(t)
        if r is None:
            r = mk(t.op, *(go(a) for a in t.args), width=width)
            memo[t] = r
        return r

    return go(term)
