"""Depth-first symbolic execution of EVM bytecode.

Exploration starts at offset 0 and enumerates paths (no state merging). At
every JUMPI both polarities are checked for feasibility; provably infeasible
sides are pruned and recorded, everything else is followed, true side first.
Concrete jump targets found along the way are added to the CFG.
"""

from __future__ import annotations

import itertools
import logging
import time
from dataclasses import dataclass, field
from typing import NamedTuple, Union

from . import cfg as cfgmod
from .cfg import BRANCH_FALSE, BRANCH_TRUE, FALLTHROUGH, JUMP, Cfg, CfgError, build_blocks, initial_cfg, record_edge
from .constraints import BUILTIN_RULES, CONSTANT_FOLD, Constraint, Feasibility, FeasibilityChecker, SolverConfig
from .constraints.simplify import mk
from .constraints.terms import Const, Sym, Term, apply_op
from .evm import DEFAULT_SCHEDULE, GasSchedule, Instruction, decode, memory_expansion_gas, sstore_gas, static_gas, words_for

log = logging.getLogger(__name__)
trace_log = logging.getLogger("gaslint.trace")

STACK_LIMIT = 1024
# byte regions larger than this are havocked instead of tracked cell by cell
MAX_REGION = 1 << 14
# expanding memory past this costs more than any block gas limit allows
MAX_MEMORY = 1 << 24

SUCCESS = frozenset({"stop", "return", "selfdestruct", "end_of_code"})
TRUNCATIONS = frozenset({"loop_bound", "depth_limit", "time_budget", "unresolved_jump", "unknown_opcode"})

class _MemoryLimit(Exception):
    pass


_ENV = {
    "ADDRESS": "address", "ORIGIN": "origin", "CALLER": "caller", "CALLVALUE": "callvalue",
    "CALLDATASIZE": "calldatasize", "GASPRICE": "gasprice", "COINBASE": "coinbase",
    "TIMESTAMP": "timestamp", "NUMBER": "number", "DIFFICULTY": "difficulty", "GASLIMIT": "gaslimit",
}
_BINARY = {
    "ADD": "add", "SUB": "sub", "MUL": "mul", "DIV": "div", "MOD": "mod",
    "LT": "lt", "GT": "gt", "SLT": "slt", "SGT": "sgt", "EQ": "eq",
    "AND": "and", "OR": "or", "XOR": "xor", "BYTE": "byte",
}

# a memory byte: concrete value, or (word term, big-endian byte index)
Cell = Union[int, tuple[Term, int]]


class DerivedConst(Const):
    """A constant obtained by simplifying an expression over symbols.

    Compares equal to a plain :class:`Const`; only used to attribute branch
    pruning to the rewrite rules instead of plain constant folding.
    """

    __slots__ = ()


def _derive(result: Term, args: tuple[Term, ...]) -> Term:
    if isinstance(result, Const) and not isinstance(result, DerivedConst):
        if any(not isinstance(a, Const) or isinstance(a, DerivedConst) for a in args):
            return DerivedConst(result.value)
    return result


@dataclass
class ExplorationLimits:
    max_depth: int = 64
    max_paths: int = 4096
    max_loop_visits: int = 8
    time_budget: float | None = 60.0
    solver_budget: float = 1.0

    def as_dict(self) -> dict:
        return {
            "max_depth": self.max_depth,
            "max_paths": self.max_paths,
            "max_loop_visits": self.max_loop_visits,
            "time_budget": self.time_budget,
            "solver_budget": self.solver_budget,
        }


@dataclass
class SymState:
    pc: int = 0
    stack: list[Term] = field(default_factory=list)
    memory: dict[int, Cell] = field(default_factory=dict)
    memory_havoc: bool = False
    memory_words: int = 0
    storage: dict[Term, Term] = field(default_factory=dict)
    path_condition: tuple[Constraint, ...] = ()
    gas_used: int = 0
    refund_counter: int = 0
    gas_uncertain: bool = False
    depth: int = 0
    loop_visits: dict[int, int] = field(default_factory=dict)
    block: int | None = None
    trace: list[int] = field(default_factory=list)
    status: str | None = None
    edge_label: str | None = None

    def fork(self) -> "SymState":
        return SymState(
            self.pc, list(self.stack), dict(self.memory), self.memory_havoc, self.memory_words,
            dict(self.storage), self.path_condition, self.gas_used, self.refund_counter,
            self.gas_uncertain, self.depth, dict(self.loop_visits), self.block, list(self.trace),
            self.status, self.edge_label,
        )

    @property
    def terminal(self) -> bool:
        return self.status is not None


class GasReport(NamedTuple):
    gas_used: int
    refund_counter: int
    effective: int


def path_gas(state: SymState) -> GasReport:
    """Charged gas and the uncommitted refund; the refund (capped at half the
    charge) only counts toward ``effective`` for successfully halted paths."""
    refund = 0
    if state.status in SUCCESS:
        refund = min(state.refund_counter, state.gas_used // 2)
    return GasReport(state.gas_used, state.refund_counter, state.gas_used - refund)


@dataclass
class BranchRecord:
    true_taken: bool = False
    false_taken: bool = False
    # polarity -> proof source, for sides pruned as infeasible
    pruned: dict[bool, str] = field(default_factory=dict)
    unresolved: bool = False

    def taken(self, polarity: bool) -> bool:
        return self.true_taken if polarity else self.false_taken


@dataclass(frozen=True)
class Diagnostic:
    pc: int
    kind: str
    detail: str = ""


@dataclass(frozen=True)
class PathRecord:
    status: str
    trace: tuple[int, ...]
    final_stack: tuple[Term, ...]
    gas: GasReport
    gas_uncertain: bool


@dataclass
class ExplorationResult:
    visited_blocks: frozenset[int]
    branch_record: dict[int, BranchRecord]
    final_cfg: Cfg
    complete: bool
    path_count: int
    diagnostics: list[Diagnostic]
    paths: list[PathRecord]
    wall_time: float = 0.0
    instructions: list[Instruction] = field(default_factory=list)


class SymbolicExecutor:
    def __init__(self, bytecode: bytes, limits: ExplorationLimits | None = None,
                 checker: FeasibilityChecker | None = None,
                 schedule: GasSchedule = DEFAULT_SCHEDULE, trace: bool = False) -> None:
        self.code = bytes(bytecode)
        self.limits = limits or ExplorationLimits()
        self.checker = checker or FeasibilityChecker()
        self.schedule = schedule
        self.trace = trace
        self.instructions = decode(self.code)
        self.by_offset = {i.offset: i for i in self.instructions}
        self.cfg = initial_cfg(build_blocks(self.instructions))
        self.block_starts = frozenset(self.cfg.blocks)
        self.branch_record: dict[int, BranchRecord] = {}
        self.visited: set[int] = set()
        self.complete = True
        self._diag: dict[tuple[int, str], Diagnostic] = {}
        self._counter = itertools.count()
        self._memo: dict[tuple, Sym] = {}
        self._deadline: float | None = None

    # --- bookkeeping ---------------------------------------------------------

    def diagnose(self, pc: int, kind: str, detail: str = "") -> None:
        self._diag.setdefault((pc, kind), Diagnostic(pc, kind, detail))

    @property
    def diagnostics(self) -> list[Diagnostic]:
        return sorted(self._diag.values(), key=lambda d: (d.pc, d.kind))

    def fresh(self, origin: str) -> Sym:
        return Sym(f"{origin}_{next(self._counter)}", origin)

    def memo_sym(self, origin: str, key: object) -> Sym:
        k = (origin, key)
        s = self._memo.get(k)
        if s is None:
            s = self.fresh(origin)
            self._memo[k] = s
        return s

    def _halt(self, s: SymState, status: str, ins: Instruction | None = None, detail: str = "") -> list[SymState]:
        s.status = status
        if status in TRUNCATIONS:
            self.complete = False
        if status not in SUCCESS:
            self.diagnose(ins.offset if ins is not None else s.pc, status, detail)
        return [s]

    # --- memory --------------------------------------------------------------

    def _touch(self, s: SymState, off: Term, length: Term) -> tuple[int, int] | None:
        """Charge expansion for a region; returns it when concrete and trackable."""
        if isinstance(length, Const) and length.value == 0:
            return (0, 0)
        if not (isinstance(off, Const) and isinstance(length, Const)):
            s.gas_uncertain = True
            return None
        if off.value + length.value > MAX_MEMORY:
            raise _MemoryLimit(off.value + length.value)
        new = words_for(off.value, length.value)
        if new > s.memory_words:
            s.gas_used += memory_expansion_gas(s.memory_words, new, self.schedule)
            s.memory_words = new
        return (off.value, length.value)

    def _havoc_memory(self, s: SymState) -> None:
        s.memory = {}
        s.memory_havoc = True

    def _read_cells(self, s: SymState, off: int, length: int) -> list[Cell | None]:
        cells: list[Cell | None] = []
        for a in range(off, off + length):
            c = s.memory.get(a)
            if c is None and not s.memory_havoc:
                c = 0
            cells.append(c)
        return cells

    def _write_word(self, s: SymState, off: int, value: Term) -> None:
        if isinstance(value, Const):
            for i, b in enumerate(value.value.to_bytes(32, "big")):
                s.memory[off + i] = b
        else:
            for i in range(32):
                s.memory[off + i] = (value, i)

    def _write_fresh(self, s: SymState, region: tuple[int, int] | None, origin: str) -> None:
        if region is None or region[1] > MAX_REGION:
            self._havoc_memory(s)
            return
        off, length = region
        for j in range(0, length, 32):
            word = self.fresh(origin)
            for i in range(min(32, length - j)):
                s.memory[off + j + i] = (word, i)

    def _mload(self, s: SymState, off: int) -> Term:
        cells = self._read_cells(s, off, 32)
        if any(c is None for c in cells):
            return self.fresh("mem")
        if all(isinstance(c, int) for c in cells):
            return Const(int.from_bytes(bytes(cells), "big"))  # type: ignore[arg-type]
        first = cells[0]
        if isinstance(first, tuple) and all(c == (first[0], i) for i, c in enumerate(cells)):
            return first[0]
        acc: Term = Const(0)
        for k, c in enumerate(cells):
            if isinstance(c, int):
                part: Term = Const(c << (8 * (31 - k)))
            else:
                assert c is not None
                part = mk("shl", Const(8 * (31 - k)), mk("byte", Const(c[1]), c[0]))
            acc = mk("or", acc, part)
        return acc

    # --- storage -------------------------------------------------------------

    def _initial_storage(self, key: Term) -> Term:
        if isinstance(key, Const):
            return Sym(f"storage_{key.value:#x}", "storage")
        return self.memo_sym("storage", key)

    def _sload(self, s: SymState, key: Term) -> Term:
        val = self._initial_storage(key)
        for k, v in s.storage.items():
            hit = mk("eq", key, k)
            if isinstance(hit, Const):
                if hit.value:
                    val = v
            else:
                val = mk("ite", hit, v, val)
        return val

    def _sstore(self, s: SymState, key: Term, value: Term) -> None:
        old = self._sload(s, key)
        old_zero = old.value == 0 if isinstance(old, Const) else None
        new_zero = value.value == 0 if isinstance(value, Const) else None
        if old_zero is not None and new_zero is not None:
            cost, refund = sstore_gas(old_zero, new_zero, self.schedule)
        else:
            # lower bound: the reset price; no refund is credited when unsure
            cost, refund = self.schedule.sstore_reset, 0
            s.gas_uncertain = True
        s.gas_used += cost
        s.refund_counter += refund
        s.storage.pop(key, None)
        s.storage[key] = value

    # --- stepping ------------------------------------------------------------

    def step(self, s: SymState, ins: Instruction) -> list[SymState]:
        """Execute one instruction. ``s`` is updated in place and returned as the
        (first) successor; a JUMPI may add a forked second successor."""
        op = ins.opcode
        s.edge_label = None
        if op.is_unknown:
            return self._halt(s, "unknown_opcode", ins, f"byte 0x{op.code:02x}")
        if len(s.stack) < op.stack_pops:
            return self._halt(s, "stack_underflow", ins)
        if len(s.stack) - op.stack_pops + op.stack_pushes > STACK_LIMIT:
            return self._halt(s, "stack_overflow", ins)
        base = static_gas(op)
        if isinstance(base, int):
            s.gas_used += base
        s.pc = ins.next_offset
        try:
            return self._dispatch(s, ins)
        except _MemoryLimit as exc:
            return self._halt(s, "out_of_gas", ins, f"memory expansion to {exc.args[0]} bytes")

    def _dispatch(self, s: SymState, ins: Instruction) -> list[SymState]:
        op = ins.opcode
        name = op.mnemonic
        st = s.stack
        if op.pushed_bytes:
            st.append(Const(ins.operand))
            if ins.truncated:
                return self._halt(s, "end_of_code")
        elif name.startswith("DUP"):
            st.append(st[-int(name[3:])])
        elif name.startswith("SWAP"):
            n = int(name[4:])
            st[-1], st[-1 - n] = st[-1 - n], st[-1]
        elif name == "POP":
            st.pop()
        elif name in _BINARY:
            a = st.pop()
            b = st.pop()
            st.append(_derive(mk(_BINARY[name], a, b), (a, b)))
        elif name in ("ADDMOD", "MULMOD"):
            a, b, n = st.pop(), st.pop(), st.pop()
            st.append(_derive(mk(name.lower(), a, b, n), (a, b, n)))
        elif name in ("ISZERO", "NOT"):
            a = st.pop()
            st.append(_derive(mk(name.lower(), a), (a,)))
        elif name == "EXP":
            b, e = st.pop(), st.pop()
            if isinstance(e, Const):
                s.gas_used += self.schedule.exp_per_byte * ((e.value.bit_length() + 7) // 8)
                st.append(_derive(mk("exp", b, e), (b, e)))
            else:
                s.gas_uncertain = True
                st.append(self.fresh("exp"))
        elif name in ("SDIV", "SMOD", "SIGNEXTEND"):
            a, b = st.pop(), st.pop()
            if isinstance(a, Const) and isinstance(b, Const):
                st.append(Const(_signed_op(name, a.value, b.value)))
            else:
                st.append(self.fresh(name.lower()))
        elif name in _ENV:
            st.append(Sym(_ENV[name], "env"))
        elif name == "CALLDATALOAD":
            off = st.pop()
            if isinstance(off, Const):
                st.append(Sym(f"calldata_{off.value}", "calldata"))
            else:
                st.append(self.memo_sym("calldata", off))
        elif name in ("BALANCE", "EXTCODESIZE", "BLOCKHASH"):
            st.append(self.memo_sym(name.lower(), st.pop()))
        elif name == "CODESIZE":
            st.append(Const(len(self.code)))
        elif name == "PC":
            st.append(Const(ins.offset))
        elif name == "MSIZE":
            st.append(self.fresh("msize") if s.memory_havoc else Const(32 * s.memory_words))
        elif name == "GAS":
            st.append(self.fresh("gas"))
        elif name == "MLOAD":
            off = st.pop()
            region = self._touch(s, off, Const(32))
            st.append(self.fresh("mem") if region is None else self._mload(s, region[0]))
        elif name in ("MSTORE", "MSTORE8"):
            off, val = st.pop(), st.pop()
            region = self._touch(s, off, Const(32 if name == "MSTORE" else 1))
            if region is None:
                self._havoc_memory(s)
            elif name == "MSTORE":
                self._write_word(s, region[0], val)
            else:
                s.memory[region[0]] = val.value & 0xFF if isinstance(val, Const) else (val, 31)
        elif name == "SHA3":
            off, length = st.pop(), st.pop()
            region = self._touch(s, off, length)
            if region is None or region[1] > MAX_REGION:
                s.gas_uncertain = True
                st.append(self.fresh("sha3"))
            else:
                s.gas_used += self.schedule.sha3_per_word * words_for(0, region[1])
                cells = self._read_cells(s, *region)
                if any(c is None for c in cells):
                    st.append(self.fresh("sha3"))
                else:
                    st.append(self.memo_sym("sha3", tuple(cells)))
        elif name in ("CALLDATACOPY", "CODECOPY"):
            moff, src, length = st.pop(), st.pop(), st.pop()
            region = self._touch(s, moff, length)
            self._charge_copy(s, length)
            if name == "CODECOPY" and region is not None and isinstance(src, Const) and region[1] <= MAX_REGION:
                chunk = self.code[src.value : src.value + region[1]].ljust(region[1], b"\x00")
                for i, b in enumerate(chunk):
                    s.memory[region[0] + i] = b
            else:
                self._write_fresh(s, region, name.lower())
        elif name == "EXTCODECOPY":
            _addr, moff, _src, length = st.pop(), st.pop(), st.pop(), st.pop()
            region = self._touch(s, moff, length)
            self._charge_copy(s, length)
            self._write_fresh(s, region, "extcode")
        elif name.startswith("LOG"):
            off, length = st.pop(), st.pop()
            for _ in range(int(name[3:])):
                st.pop()
            self._touch(s, off, length)
            if isinstance(length, Const):
                s.gas_used += self.schedule.log_per_byte * length.value
            else:
                s.gas_uncertain = True
        elif name == "SLOAD":
            st.append(self._sload(s, st.pop()))
        elif name == "SSTORE":
            key, val = st.pop(), st.pop()
            self._sstore(s, key, val)
        elif name == "JUMPDEST":
            pass
        elif name == "JUMP":
            return self._jump(s, ins, st.pop())
        elif name == "JUMPI":
            dest, cond = st.pop(), st.pop()
            return self._jumpi(s, ins, dest, cond)
        elif name == "CREATE":
            _value, off, length = st.pop(), st.pop(), st.pop()
            self._touch(s, off, length)
            st.append(self.fresh("create"))
        elif name in ("CALL", "CALLCODE", "DELEGATECALL"):
            args = [st.pop() for _ in range(op.stack_pops)]
            in_off, in_len, out_off, out_len = args[-4:]
            self._touch(s, in_off, in_len)
            out = self._touch(s, out_off, out_len)
            if not (isinstance(out_len, Const) and out_len.value == 0):
                self._write_fresh(s, out, "returndata")
            st.append(self.fresh("call"))
        elif name == "RETURN":
            off, length = st.pop(), st.pop()
            self._touch(s, off, length)
            return self._halt(s, "return")
        elif name == "STOP":
            return self._halt(s, "stop")
        elif name == "SELFDESTRUCT":
            st.pop()
            return self._halt(s, "selfdestruct")
        else:  # pragma: no cover - every table opcode is handled above
            raise NotImplementedError(name)
        return [s]

    def _charge_copy(self, s: SymState, length: Term) -> None:
        if isinstance(length, Const):
            s.gas_used += self.schedule.copy_per_word * words_for(0, length.value)
        else:
            s.gas_uncertain = True

    def _resolve_target(self, s: SymState, ins: Instruction, dest: Term) -> int | None | str:
        if not isinstance(dest, Const):
            return "unresolved"
        if not self.cfg.is_jumpdest(dest.value):
            return "invalid"
        return dest.value

    def _jump(self, s: SymState, ins: Instruction, dest: Term) -> list[SymState]:
        tgt = self._resolve_target(s, ins, dest)
        if tgt == "unresolved":
            return self._halt(s, "unresolved_jump", ins, repr(dest))
        if tgt == "invalid":
            return self._halt(s, "invalid_jump", ins, f"target {dest!r}")
        s.pc = tgt  # type: ignore[assignment]
        s.edge_label = JUMP
        return [s]

    def _feasibility(self, s: SymState, c: Constraint) -> Feasibility:
        if isinstance(c.term, Const):
            ok = bool(c.term.value) == c.polarity
            src = BUILTIN_RULES if isinstance(c.term, DerivedConst) else CONSTANT_FOLD
            return Feasibility("feasible" if ok else "infeasible", src, {} if ok else None)
        budget = self.limits.solver_budget
        if self._deadline is not None:
            budget = max(0.0, min(budget, self._deadline - time.monotonic()))
        return self.checker.check(s.path_condition + (c,), budget)

    def _jumpi(self, s: SymState, ins: Instruction, dest: Term, cond: Term) -> list[SymState]:
        rec = self.branch_record.setdefault(ins.offset, BranchRecord())
        out: list[SymState] = []
        sides = []
        for polarity in (True, False):
            c = Constraint(cond, polarity)
            res = self._feasibility(s, c)
            if res.infeasible:
                rec.pruned.setdefault(polarity, res.source)
            else:
                sides.append((polarity, c))
        forked = len(sides) == 2
        for polarity, c in sides:
            t = s.fork() if (forked and polarity) else s
            if not isinstance(cond, Const):
                t.path_condition = t.path_condition + (c,)
            if forked:
                t.depth += 1
            if polarity:
                tgt = self._resolve_target(t, ins, dest)
                if tgt == "unresolved":
                    rec.unresolved = True
                    out.extend(self._halt(t, "unresolved_jump", ins, repr(dest)))
                    continue
                rec.true_taken = True
                if tgt == "invalid":
                    out.extend(self._halt(t, "invalid_jump", ins, f"target {dest!r}"))
                    continue
                t.pc = tgt  # type: ignore[assignment]
                t.edge_label = BRANCH_TRUE
            else:
                rec.false_taken = True
                t.edge_label = BRANCH_FALSE
            out.append(t)
        if not out:
            return self._halt(s, "infeasible_path", ins)
        return out

    # --- exploration -----------------------------------------------------------

    def _enter_block(self, s: SymState) -> bool:
        """Block-entry bookkeeping; returns False when a limit ends the path."""
        pc = s.pc
        if s.block is not None:
            try:
                record_edge(self.cfg, s.block, pc, s.edge_label or FALLTHROUGH)
            except CfgError as exc:
                self.diagnose(pc, "cfg_conflict", str(exc))
        lim = self.limits
        if self._deadline is not None and time.monotonic() > self._deadline:
            self._halt(s, "time_budget")
            return False
        if s.loop_visits.get(pc, 0) >= lim.max_loop_visits:
            self._halt(s, "loop_bound")
            return False
        if s.depth > lim.max_depth:
            self._halt(s, "depth_limit")
            return False
        s.loop_visits[pc] = s.loop_visits.get(pc, 0) + 1
        s.trace.append(pc)
        s.block = pc
        self.visited.add(pc)
        return True

    def _run_path(self, s: SymState, work: list[SymState]) -> SymState:
        while True:
            if s.pc in self.block_starts and not self._enter_block(s):
                return s
            ins = self.by_offset.get(s.pc)
            if ins is None:
                s.status = "end_of_code"
                return s
            succ = self.step(s, ins)
            if self.trace:
                trace_log.debug("%#06x %s %d", ins.offset, ins.name, succ[0].gas_used)
            if len(succ) == 2:
                work.append(succ[1])
            s = succ[0]
            if s.terminal:
                return s

    def explore(self) -> ExplorationResult:
        started = time.monotonic()
        if self.limits.time_budget is not None:
            self._deadline = started + self.limits.time_budget
        paths: list[PathRecord] = []
        work = [SymState()] if self.instructions else []
        while work:
            if len(paths) >= self.limits.max_paths:
                self.complete = False
                self.diagnose(-1, "path_limit", f"{len(work)} pending states dropped")
                break
            s = self._run_path(work.pop(), work)
            paths.append(PathRecord(s.status or "end_of_code", tuple(s.trace), tuple(s.stack),
                                    path_gas(s), s.gas_uncertain))
        return ExplorationResult(
            visited_blocks=frozenset(self.visited),
            branch_record=self.branch_record,
            final_cfg=self.cfg,
            complete=self.complete,
            path_count=len(paths),
            diagnostics=self.diagnostics,
            paths=paths,
            wall_time=time.monotonic() - started,
            instructions=self.instructions,
        )


def _signed_op(name: str, a: int, b: int) -> int:
    w = 256
    sa = a - (1 << w) if a >> (w - 1) else a
    sb = b - (1 << w) if b >> (w - 1) else b
    if name == "SDIV":
        if sb == 0:
            return 0
        q = abs(sa) // abs(sb)
        return (-q if (sa < 0) != (sb < 0) else q) % (1 << w)
    if name == "SMOD":
        if sb == 0:
            return 0
        r = abs(sa) % abs(sb)
        return (-r if sa < 0 else r) % (1 << w)
    # SIGNEXTEND: a = byte index, b = value
    if a >= 31:
        return b
    bit = 8 * a + 7
    mask = (1 << (bit + 1)) - 1
    if (b >> bit) & 1:
        return b | ((1 << w) - 1 - mask)
    return b & mask


def step(state: SymState, instruction: Instruction, bytecode: bytes = b"") -> list[SymState]:
    """Execute a single instruction against ``bytecode`` context (jump targets, CODESIZE)."""
    return SymbolicExecutor(bytecode).step(state, instruction)


def explore(bytecode: bytes, limits: ExplorationLimits | None = None,
            checker: FeasibilityChecker | None = None, solver: SolverConfig | None = None,
            trace: bool = False) -> ExplorationResult:
    if checker is None:
        checker = FeasibilityChecker(solver=solver)
    return SymbolicExecutor(bytecode, limits, checker, trace=trace).explore()


__all__ = [
    "ExplorationLimits", "ExplorationResult", "SymState", "SymbolicExecutor", "BranchRecord",
    "Diagnostic", "PathRecord", "GasReport", "path_gas", "step", "explore",
]
