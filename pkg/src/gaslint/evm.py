"""EVM instruction set, bytecode decoding and the gas fee schedule.

The opcode set is the Homestead-era instruction set, which already includes
DELEGATECALL and EXTCODESIZE. Anything else decodes as an UNKNOWN opcode that
keeps its byte value, so decoding never fails and always round-trips.

Fixed costs follow the late-2016 (EIP-150) schedule. SSTORE is priced
dynamically and memory-touching instructions additionally pay for memory
expansion at 3 gas per word.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Union


class InputError(ValueError):
    """Raised for malformed user input (bad hex text, bad addresses)."""


class GasKind(enum.Enum):
    FIXED = "fixed"
    SSTORE = "sstore_dynamic"
    MEMORY = "memory_touching"
    CALL = "call_class"
    UNKNOWN = "unknown"


class GasMarker(enum.Enum):
    DYNAMIC = "dynamic"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class GasClass:
    kind: GasKind
    base: int | None = None


@dataclass(frozen=True)
class Opcode:
    mnemonic: str
    code: int
    stack_pops: int
    stack_pushes: int
    gas_class: GasClass
    pushed_bytes: int = 0

    @property
    def is_unknown(self) -> bool:
        return self.mnemonic == "UNKNOWN"

    def __str__(self) -> str:
        if self.is_unknown:
            return f"UNKNOWN(0x{self.code:02x})"
        return self.mnemonic


def _fixed(n: int) -> GasClass:
    return GasClass(GasKind.FIXED, n)


def _mem(n: int) -> GasClass:
    return GasClass(GasKind.MEMORY, n)


def _call(n: int) -> GasClass:
    return GasClass(GasKind.CALL, n)


# mnemonic, byte, pops, pushes, gas class
_TABLE: list[tuple[str, int, int, int, GasClass]] = [
    ("STOP", 0x00, 0, 0, _fixed(0)),
    ("ADD", 0x01, 2, 1, _fixed(3)),
    ("MUL", 0x02, 2, 1, _fixed(5)),
    ("SUB", 0x03, 2, 1, _fixed(3)),
    ("DIV", 0x04, 2, 1, _fixed(5)),
    ("SDIV", 0x05, 2, 1, _fixed(5)),
    ("MOD", 0x06, 2, 1, _fixed(5)),
    ("SMOD", 0x07, 2, 1, _fixed(5)),
    ("ADDMOD", 0x08, 3, 1, _fixed(8)),
    ("MULMOD", 0x09, 3, 1, _fixed(8)),
    ("EXP", 0x0A, 2, 1, _fixed(10)),
    ("SIGNEXTEND", 0x0B, 2, 1, _fixed(5)),
    ("LT", 0x10, 2, 1, _fixed(3)),
    ("GT", 0x11, 2, 1, _fixed(3)),
    ("SLT", 0x12, 2, 1, _fixed(3)),
    ("SGT", 0x13, 2, 1, _fixed(3)),
    ("EQ", 0x14, 2, 1, _fixed(3)),
    ("ISZERO", 0x15, 1, 1, _fixed(3)),
    ("AND", 0x16, 2, 1, _fixed(3)),
    ("OR", 0x17, 2, 1, _fixed(3)),
    ("XOR", 0x18, 2, 1, _fixed(3)),
    ("NOT", 0x19, 1, 1, _fixed(3)),
    ("BYTE", 0x1A, 2, 1, _fixed(3)),
    ("SHA3", 0x20, 2, 1, _mem(30)),
    ("ADDRESS", 0x30, 0, 1, _fixed(2)),
    ("BALANCE", 0x31, 1, 1, _fixed(400)),
    ("ORIGIN", 0x32, 0, 1, _fixed(2)),
    ("CALLER", 0x33, 0, 1, _fixed(2)),
    ("CALLVALUE", 0x34, 0, 1, _fixed(2)),
    ("CALLDATALOAD", 0x35, 1, 1, _fixed(3)),
    ("CALLDATASIZE", 0x36, 0, 1, _fixed(2)),
    ("CALLDATACOPY", 0x37, 3, 0, _mem(3)),
    ("CODESIZE", 0x38, 0, 1, _fixed(2)),
    ("CODECOPY", 0x39, 3, 0, _mem(3)),
    ("GASPRICE", 0x3A, 0, 1, _fixed(2)),
    ("EXTCODESIZE", 0x3B, 1, 1, _fixed(700)),
    ("EXTCODECOPY", 0x3C, 4, 0, _mem(700)),
    ("BLOCKHASH", 0x40, 1, 1, _fixed(20)),
    ("COINBASE", 0x41, 0, 1, _fixed(2)),
    ("TIMESTAMP", 0x42, 0, 1, _fixed(2)),
    ("NUMBER", 0x43, 0, 1, _fixed(2)),
    ("DIFFICULTY", 0x44, 0, 1, _fixed(2)),
    ("GASLIMIT", 0x45, 0, 1, _fixed(2)),
    ("POP", 0x50, 1, 0, _fixed(2)),
    ("MLOAD", 0x51, 1, 1, _mem(3)),
    ("MSTORE", 0x52, 2, 0, _mem(3)),
    ("MSTORE8", 0x53, 2, 0, _mem(3)),
    ("SLOAD", 0x54, 1, 1, _fixed(200)),
    ("SSTORE", 0x55, 2, 0, GasClass(GasKind.SSTORE)),
    ("JUMP", 0x56, 1, 0, _fixed(8)),
    ("JUMPI", 0x57, 2, 0, _fixed(10)),
    ("PC", 0x58, 0, 1, _fixed(2)),
    ("MSIZE", 0x59, 0, 1, _fixed(2)),
    ("GAS", 0x5A, 0, 1, _fixed(2)),
    ("JUMPDEST", 0x5B, 0, 0, _fixed(1)),
    ("CREATE", 0xF0, 3, 1, _call(32000)),
    # Table value: the new-account charge, not the 700 base cost.
    ("CALL", 0xF1, 7, 1, _call(25000)),
    ("CALLCODE", 0xF2, 7, 1, _call(700)),
    ("RETURN", 0xF3, 2, 0, _mem(0)),
    ("DELEGATECALL", 0xF4, 6, 1, _call(700)),
    ("SELFDESTRUCT", 0xFF, 1, 0, _fixed(5000)),
]
_TABLE += [(f"PUSH{n}", 0x5F + n, 0, 1, _fixed(3)) for n in range(1, 33)]
_TABLE += [(f"DUP{n}", 0x7F + n, n, n + 1, _fixed(3)) for n in range(1, 17)]
_TABLE += [(f"SWAP{n}", 0x8F + n, n + 1, n + 1, _fixed(3)) for n in range(1, 17)]
_TABLE += [(f"LOG{n}", 0xA0 + n, n + 2, 0, _mem(375 + 375 * n)) for n in range(5)]

OPCODES: dict[int, Opcode] = {}
BY_NAME: dict[str, Opcode] = {}
for _name, _code, _pops, _pushes, _gas in _TABLE:
    _op = Opcode(
        _name, _code, _pops, _pushes, _gas,
        pushed_bytes=_code - 0x5F if 0x60 <= _code <= 0x7F else 0,
    )
    OPCODES[_code] = _op
    BY_NAME[_name] = _op
BY_NAME["SUICIDE"] = BY_NAME["SELFDESTRUCT"]

_UNKNOWN_CACHE: dict[int, Opcode] = {}


def opcode_for(byte: int) -> Opcode:
    """Return the opcode for a byte value; unsupported bytes get an UNKNOWN opcode."""
    op = OPCODES.get(byte)
    if op is not None:
        return op
    op = _UNKNOWN_CACHE.get(byte)
    if op is None:
        op = Opcode("UNKNOWN", byte, 0, 0, GasClass(GasKind.UNKNOWN))
        _UNKNOWN_CACHE[byte] = op
    return op


HALTING = frozenset({"STOP", "RETURN", "SELFDESTRUCT"})
JUMPS = frozenset({"JUMP", "JUMPI"})


@dataclass(frozen=True)
class Instruction:
    offset: int
    opcode: Opcode
    operand: int = 0
    truncated: bool = False

    @property
    def size(self) -> int:
        return 1 + self.opcode.pushed_bytes

    @property
    def name(self) -> str:
        return self.opcode.mnemonic

    @property
    def next_offset(self) -> int:
        return self.offset + self.size

    def is_terminator(self) -> bool:
        return (
            self.truncated
            or self.opcode.is_unknown
            or self.name in JUMPS
            or self.name in HALTING
        )

    def to_bytes(self) -> bytes:
        n = self.opcode.pushed_bytes
        if n == 0:
            return bytes([self.opcode.code])
        return bytes([self.opcode.code]) + self.operand.to_bytes(n, "big")

    def __str__(self) -> str:
        if self.opcode.pushed_bytes:
            tail = " (truncated)" if self.truncated else ""
            return f"{self.offset:#06x} {self.name} 0x{self.operand:0{2 * self.opcode.pushed_bytes}x}{tail}"
        return f"{self.offset:#06x} {self.opcode}"


def decode(bytecode: bytes) -> list[Instruction]:
    """Decode bytecode into instructions. Total: never raises on any input.

    A PUSH whose immediate runs past the end of the code is zero-padded on the
    right and flagged ``truncated``; it is always the last instruction.
    """
    out: list[Instruction] = []
    pc = 0
    n = len(bytecode)
    while pc < n:
        op = opcode_for(bytecode[pc])
        width = op.pushed_bytes
        if width:
            raw = bytecode[pc + 1 : pc + 1 + width]
            truncated = len(raw) < width
            operand = int.from_bytes(raw.ljust(width, b"\x00"), "big")
            out.append(Instruction(pc, op, operand, truncated))
            if truncated:
                break
        else:
            out.append(Instruction(pc, op))
        pc += 1 + width
    return out


def encode(instructions: Iterable[Instruction]) -> bytes:
    return b"".join(i.to_bytes() for i in instructions)


_HEX_RE = re.compile(r"^[0-9a-fA-F]*$")


def parse_hex(text: str) -> bytes:
    """Parse hex text with optional ``0x`` prefix and surrounding whitespace."""
    s = text.strip()
    if s[:2] in ("0x", "0X"):
        s = s[2:]
    if not _HEX_RE.match(s):
        raise InputError("bytecode text contains non-hex characters")
    if len(s) % 2:
        raise InputError("odd-length hex bytecode")
    return bytes.fromhex(s)


_TEXT_BYTES = frozenset(range(0x20, 0x7F)) | frozenset(b"\t\r\n")


def load_bytecode(data: Union[bytes, str]) -> bytes:
    """Interpret input as hex text when it is printable ASCII, else as raw bytes.

    Compiled code practically always contains control bytes (0x00-0x1f), so a
    printable file is hex text and gets validated as such.
    """
    if isinstance(data, str):
        return parse_hex(data)
    if data and all(b in _TEXT_BYTES for b in data):
        return parse_hex(data.decode("ascii"))
    return bytes(data)


# --- gas ----------------------------------------------------------------------


@dataclass(frozen=True)
class GasSchedule:
    fixed_costs: dict[str, int] = field(
        default_factory=lambda: {
            name: op.gas_class.base
            for name, op in BY_NAME.items()
            if op.gas_class.base is not None
        }
    )
    sstore_set: int = 20000
    sstore_reset: int = 5000
    sstore_refund: int = 15000
    memory_expansion_per_word: int = 3
    sha3_per_word: int = 6
    copy_per_word: int = 3
    log_per_byte: int = 8
    exp_per_byte: int = 10

    def cost_of(self, mnemonic: str) -> int:
        return self.fixed_costs[mnemonic]


DEFAULT_SCHEDULE = GasSchedule()


def static_gas(opcode: Opcode) -> int | GasMarker:
    """Base cost of an opcode.

    Memory and call class opcodes report their base charge (MLOAD, CALL and
    friends have a single fixed value in the fee table); the memory/expansion
    part is charged at execution time. SSTORE has no static cost.
    """
    gc = opcode.gas_class
    if gc.kind is GasKind.UNKNOWN:
        return GasMarker.UNKNOWN
    if gc.kind is GasKind.SSTORE:
        return GasMarker.DYNAMIC
    assert gc.base is not None
    return gc.base


class SstoreCost(NamedTuple):
    cost: int
    refund: int


def sstore_gas(old_value_zero: bool, new_value_zero: bool,
               schedule: GasSchedule = DEFAULT_SCHEDULE) -> SstoreCost:
    if old_value_zero and not new_value_zero:
        return SstoreCost(schedule.sstore_set, 0)
    if not old_value_zero and new_value_zero:
        return SstoreCost(schedule.sstore_reset, schedule.sstore_refund)
    return SstoreCost(schedule.sstore_reset, 0)


def memory_expansion_gas(prev_high_word: int, new_high_word: int,
                         schedule: GasSchedule = DEFAULT_SCHEDULE) -> int:
    if new_high_word < prev_high_word:
        raise ValueError("memory cannot shrink")
    return schedule.memory_expansion_per_word * (new_high_word - prev_high_word)


def words_for(offset: int, length: int) -> int:
    """Number of 32-byte words needed to cover ``[offset, offset + length)``."""
    if length == 0:
        return 0
    return (offset + length + 31) // 32
