"""A tiny two-pass assembler for hand-written bytecode fixtures.

Syntax, one item per line::

    ; comment
    @loop               label (emits nothing; put JUMPDEST after it yourself)
    PUSH1 0x20          immediate in hex or decimal
    PUSH1 :loop         label reference, encoded in the PUSH width
    SLOAD
    .byte 0xfe 0x00     raw bytes
"""

from __future__ import annotations

from .evm import BY_NAME, InputError


def _int(tok: str) -> int:
    return int(tok, 0)


def assemble(source: str) -> bytes:
    items: list[tuple[str, list[str], int]] = []
    for lineno, raw in enumerate(source.splitlines(), 1):
        line = raw.split(";", 1)[0].strip()
        if line:
            toks = line.split()
            items.append((toks[0], toks[1:], lineno))

    labels: dict[str, int] = {}
    pc = 0
    for head, args, lineno in items:
        if head.startswith("@"):
            if head[1:] in labels:
                raise InputError(f"line {lineno}: duplicate label {head}")
            labels[head[1:]] = pc
        elif head == ".byte":
            pc += len(args)
        else:
            op = BY_NAME.get(head.upper())
            if op is None:
                raise InputError(f"line {lineno}: unknown mnemonic {head}")
            pc += 1 + op.pushed_bytes

    out = bytearray()
    for head, args, lineno in items:
        if head.startswith("@"):
            continue
        if head == ".byte":
            out.extend(_int(a) & 0xFF for a in args)
            continue
        op = BY_NAME[head.upper()]
        out.append(op.code)
        if op.pushed_bytes:
            if len(args) != 1:
                raise InputError(f"line {lineno}: {head} needs one operand")
            arg = args[0]
            if arg.startswith(":"):
                if arg[1:] not in labels:
                    raise InputError(f"line {lineno}: undefined label {arg}")
                val = labels[arg[1:]]
            else:
                val = _int(arg)
            if val >= 1 << (8 * op.pushed_bytes):
                raise InputError(f"line {lineno}: operand {val:#x} does not fit {head}")
            out.extend(val.to_bytes(op.pushed_bytes, "big"))
        elif args:
            raise InputError(f"line {lineno}: {head} takes no operand")
    return bytes(out)
