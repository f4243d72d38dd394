"""Independent concrete EVM interpreter used as a test oracle.

Deliberately shares no code with the package: opcodes are matched by byte
value and gas numbers are written out here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

M = (1 << 256) - 1

_FIXED = {
    0x01: 3, 0x02: 5, 0x03: 3, 0x04: 5, 0x05: 5, 0x06: 5, 0x07: 5, 0x08: 8, 0x09: 8, 0x0B: 5,
    0x10: 3, 0x11: 3, 0x12: 3, 0x13: 3, 0x14: 3, 0x15: 3, 0x16: 3, 0x17: 3, 0x18: 3, 0x19: 3, 0x1A: 3,
    0x38: 2, 0x39: 3, 0x50: 2, 0x51: 3, 0x52: 3, 0x53: 3, 0x54: 200, 0x56: 8, 0x57: 10, 0x58: 2, 0x59: 2,
    0x5B: 1, 0x0A: 10, 0x00: 0, 0xF3: 0,
}


def _s(v: int) -> int:
    return v - (1 << 256) if v >> 255 else v


@dataclass
class Run:
    status: str
    blocks: list[int]
    stack: list[int]
    gas: int
    refund: int
    storage: dict[int, int] = field(default_factory=dict)


def _leaders(code: bytes) -> set[int]:
    out = {0}
    pc = 0
    while pc < len(code):
        op = code[pc]
        if op == 0x5B:
            out.add(pc)
        size = 1 + (op - 0x5F if 0x60 <= op <= 0x7F else 0)
        if op in (0x00, 0x56, 0x57, 0xF3, 0xFF) or pc + size > len(code):
            out.add(pc + size)
        pc += size
    return out


def _jumpdests(code: bytes) -> set[int]:
    out = set()
    pc = 0
    while pc < len(code):
        op = code[pc]
        if op == 0x5B:
            out.add(pc)
        pc += 1 + (op - 0x5F if 0x60 <= op <= 0x7F else 0)
    return out


def run(code: bytes, max_steps: int = 100_000) -> Run:
    leaders = _leaders(code)
    dests = _jumpdests(code)
    st: list[int] = []
    mem = bytearray()
    storage: dict[int, int] = {}
    gas = refund = 0
    blocks: list[int] = []
    pc = 0

    def touch(off: int, n: int) -> bool:
        nonlocal gas, mem
        if n == 0:
            return True
        if off + n > 1 << 24:
            return False  # real pricing makes this exceed any block gas limit
        words = (off + n + 31) // 32
        have = len(mem) // 32
        if words > have:
            gas += 3 * (words - have)
            mem += bytes(32 * (words - have))
        return True

    def done(status: str) -> Run:
        return Run(status, blocks, st, gas, refund, storage)

    for _ in range(max_steps):
        if pc >= len(code):
            return done("end_of_code")
        if pc in leaders:
            blocks.append(pc)
        op = code[pc]

        def need(n: int) -> bool:
            return len(st) >= n

        if 0x60 <= op <= 0x7F:
            n = op - 0x5F
            raw = code[pc + 1 : pc + 1 + n]
            gas += 3
            st.append(int.from_bytes(raw.ljust(n, b"\0"), "big"))
            if len(raw) < n:
                return done("end_of_code")
            pc += 1 + n
            continue
        if 0x80 <= op <= 0x8F:
            n = op - 0x7F
            if not need(n):
                return done("stack_underflow")
            gas += 3
            st.append(st[-n])
            pc += 1
            continue
        if 0x90 <= op <= 0x9F:
            n = op - 0x8F
            if not need(n + 1):
                return done("stack_underflow")
            gas += 3
            st[-1], st[-1 - n] = st[-1 - n], st[-1]
            pc += 1
            continue

        arity = {
            0x01: 2, 0x02: 2, 0x03: 2, 0x04: 2, 0x05: 2, 0x06: 2, 0x07: 2, 0x08: 3, 0x09: 3, 0x0A: 2, 0x0B: 2,
            0x10: 2, 0x11: 2, 0x12: 2, 0x13: 2, 0x14: 2, 0x15: 1, 0x16: 2, 0x17: 2, 0x18: 2, 0x19: 1, 0x1A: 2,
            0x39: 3, 0x50: 1, 0x51: 1, 0x52: 2, 0x53: 2, 0x54: 1, 0x55: 2, 0x56: 1, 0x57: 2, 0xF3: 2,
        }.get(op, 0)
        if not need(arity):
            return done("stack_underflow")
        a = [st.pop() for _ in range(arity)]
        if op in _FIXED:
            gas += _FIXED[op]
        nxt = pc + 1

        if op == 0x00:
            return done("stop")
        elif op == 0x01:
            st.append((a[0] + a[1]) & M)
        elif op == 0x02:
            st.append((a[0] * a[1]) & M)
        elif op == 0x03:
            st.append((a[0] - a[1]) & M)
        elif op == 0x04:
            st.append(a[0] // a[1] if a[1] else 0)
        elif op == 0x05:
            x, y = _s(a[0]), _s(a[1])
            st.append(0 if y == 0 else ((abs(x) // abs(y)) * (-1 if (x < 0) != (y < 0) else 1)) & M)
        elif op == 0x06:
            st.append(a[0] % a[1] if a[1] else 0)
        elif op == 0x07:
            x, y = _s(a[0]), _s(a[1])
            st.append(0 if y == 0 else ((abs(x) % abs(y)) * (-1 if x < 0 else 1)) & M)
        elif op == 0x08:
            st.append((a[0] + a[1]) % a[2] if a[2] else 0)
        elif op == 0x09:
            st.append((a[0] * a[1]) % a[2] if a[2] else 0)
        elif op == 0x0A:
            gas += 10 * ((a[1].bit_length() + 7) // 8)
            st.append(pow(a[0], a[1], 1 << 256))
        elif op == 0x0B:
            b, x = a
            if b < 31:
                bit = 8 * b + 7
                x = x | (M ^ ((1 << (bit + 1)) - 1)) if (x >> bit) & 1 else x & ((1 << (bit + 1)) - 1)
            st.append(x)
        elif op == 0x10:
            st.append(int(a[0] < a[1]))
        elif op == 0x11:
            st.append(int(a[0] > a[1]))
        elif op == 0x12:
            st.append(int(_s(a[0]) < _s(a[1])))
        elif op == 0x13:
            st.append(int(_s(a[0]) > _s(a[1])))
        elif op == 0x14:
            st.append(int(a[0] == a[1]))
        elif op == 0x15:
            st.append(int(a[0] == 0))
        elif op == 0x16:
            st.append(a[0] & a[1])
        elif op == 0x17:
            st.append(a[0] | a[1])
        elif op == 0x18:
            st.append(a[0] ^ a[1])
        elif op == 0x19:
            st.append(a[0] ^ M)
        elif op == 0x1A:
            st.append((a[1] >> (8 * (31 - a[0]))) & 0xFF if a[0] < 32 else 0)
        elif op == 0x38:
            st.append(len(code))
        elif op == 0x39:
            moff, coff, n = a
            if not touch(moff, n):
                return done("out_of_gas")
            gas += 3 * ((n + 31) // 32)
            mem[moff : moff + n] = code[coff : coff + n].ljust(n, b"\0")
        elif op == 0x50:
            pass
        elif op == 0x51:
            if not touch(a[0], 32):
                return done("out_of_gas")
            st.append(int.from_bytes(mem[a[0] : a[0] + 32], "big"))
        elif op == 0x52:
            if not touch(a[0], 32):
                return done("out_of_gas")
            mem[a[0] : a[0] + 32] = a[1].to_bytes(32, "big")
        elif op == 0x53:
            if not touch(a[0], 1):
                return done("out_of_gas")
            mem[a[0]] = a[1] & 0xFF
        elif op == 0x54:
            st.append(storage.get(a[0], 0))
        elif op == 0x55:
            old = storage.get(a[0], 0)
            if old == 0 and a[1] != 0:
                gas += 20000
            else:
                gas += 5000
                if old != 0 and a[1] == 0:
                    refund += 15000
            storage[a[0]] = a[1]
        elif op == 0x56:
            if a[0] not in dests:
                return done("invalid_jump")
            nxt = a[0]
        elif op == 0x57:
            if a[1]:
                if a[0] not in dests:
                    return done("invalid_jump")
                nxt = a[0]
        elif op == 0x58:
            st.append(pc)
        elif op == 0x59:
            st.append(len(mem))
        elif op == 0x5B:
            pass
        elif op == 0xF3:
            if not touch(a[0], a[1]):
                return done("out_of_gas")
            return done("return")
        else:
            raise NotImplementedError(f"oracle does not model opcode 0x{op:02x}")
        if len(st) > 1024:
            return done("stack_overflow")
        pc = nxt
    raise RuntimeError("step limit exceeded")
