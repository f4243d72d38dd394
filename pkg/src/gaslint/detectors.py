"""Gas-costly pattern detectors over an exploration result."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Iterable

from .cfg import MembershipRule, find_loops, loop_membership
from .constraints import BUILTIN_RULES, CONSTANT_FOLD, EXTERNAL_SOLVER
from .evm import BY_NAME, DEFAULT_SCHEDULE, GasSchedule, static_gas
from .symexec import ExplorationResult


class PatternKind(enum.IntEnum):
    DeadCode = 1
    OpaquePredicate = 2
    ExpensiveLoopOp = 3
    # reserved identifiers, no detector
    ConstantLoopOutcome = 4
    LoopFusion = 5
    RepeatedLoopComputation = 6
    UnilateralLoopComparison = 7


PROVEN = "proven"
HEURISTIC = "heuristic"

PROOF_SOURCES = frozenset({CONSTANT_FOLD, BUILTIN_RULES, EXTERNAL_SOLVER})
LOOP_OPS = ("SLOAD", "SSTORE", "BALANCE")
_CONDITION_OPS = frozenset({"LT", "GT", "SLT", "SGT", "EQ", "ISZERO", "AND", "OR", "XOR", "NOT"})
MIN_OPAQUE_SAVING = 13


@dataclass(frozen=True)
class Finding:
    kind: PatternKind
    block: int
    start: int
    end: int
    evidence: dict[str, Any] = field(default_factory=dict, hash=False)
    confidence: str = HEURISTIC
    est_waste_gas: int | None = None

    def sort_key(self) -> tuple:
        return (int(self.kind), self.block, self.start, repr(sorted(self.evidence.items())))

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": int(self.kind),
            "kind_name": self.kind.name,
            "block": self.block,
            "start": self.start,
            "end": self.end,
            "evidence": self.evidence,
            "confidence": self.confidence,
            "est_waste_gas": self.est_waste_gas,
        }


def _block_end(result: ExplorationResult, block: int) -> int:
    b = result.final_cfg.blocks[block]
    return b.end_offset + b.last.size - 1


def detect_dead_code(result: ExplorationResult) -> list[Finding]:
    """Blocks present in the CFG that no explored path executed."""
    conf = PROVEN if result.complete else HEURISTIC
    out = []
    for bid in sorted(set(result.final_cfg.blocks) - set(result.visited_blocks)):
        blk = result.final_cfg.blocks[bid]
        out.append(Finding(
            PatternKind.DeadCode, bid, bid, _block_end(result, bid),
            {"dead_blocks": [bid], "dead_bytes": blk.byte_size},
            conf,
        ))
    return out


def detect_opaque_predicates(result: ExplorationResult) -> list[Finding]:
    """Conditional jumps where exactly one polarity was ever taken."""
    out = []
    cfg = result.final_cfg
    for site in sorted(result.branch_record):
        rec = result.branch_record[site]
        if rec.true_taken == rec.false_taken or rec.unresolved:
            continue
        never = not rec.true_taken
        source = rec.pruned.get(never)
        conf = PROVEN if (result.complete and source in PROOF_SOURCES) else HEURISTIC
        block = max(b for b in cfg.blocks if b <= site)
        out.append(Finding(
            PatternKind.OpaquePredicate, block, site, site,
            {"jump_site": site, "never_taken": "true" if never else "false", "proof_source": source},
            conf,
        ))
    return out


def detect_expensive_loop_ops(result: ExplorationResult, rule: MembershipRule = "latch",
                              strict: bool = False) -> list[Finding]:
    """SLOAD/SSTORE/BALANCE inside loop members, one finding per (loop, occurrence).

    ``strict`` keeps only blocks that also belong to the natural loop of the
    back edge. Evidence always carries both membership flags plus the
    distance-to-exit flag for comparison.
    """
    cfg = result.final_cfg
    out = []
    for loop in find_loops(cfg, rule):
        members = loop.member_blocks
        natural = loop.natural_blocks
        exit_members = members if rule == "exit" else loop_membership(cfg, loop, "exit")
        scan = members & natural if strict else members
        for bid in sorted(scan):
            for ins in cfg.blocks[bid].instructions:
                if ins.name not in LOOP_OPS:
                    continue
                out.append(Finding(
                    PatternKind.ExpensiveLoopOp, bid, ins.offset, ins.offset,
                    {
                        "opcode": ins.name,
                        "offset": ins.offset,
                        "loop_header": loop.header,
                        "loop_latch": loop.latch,
                        "heuristic_member": bid in members,
                        "strict_member": bid in natural,
                        "exit_distance_member": bid in exit_members,
                    },
                    HEURISTIC,
                ))
    return out


def loop_op_cost(opcode: str, schedule: GasSchedule = DEFAULT_SCHEDULE) -> int:
    if opcode == "SSTORE":
        # lower bound: the reset price
        return schedule.sstore_reset
    cost = static_gas(BY_NAME[opcode])
    assert isinstance(cost, int)
    return cost


def _condition_cost(result: ExplorationResult, finding: Finding) -> int:
    """Static gas of the JUMPI, its target PUSH and the comparison run before it."""
    ins = result.final_cfg.blocks[finding.block].instructions
    j = next(i for i, x in enumerate(ins) if x.offset == finding.start)
    chain = [ins[j]]
    j -= 1
    if j >= 0 and ins[j].opcode.pushed_bytes:
        chain.append(ins[j])
        j -= 1
    while j >= 0 and ins[j].name in _CONDITION_OPS:
        chain.append(ins[j])
        j -= 1
    return sum(c for c in map(static_gas, (x.opcode for x in chain)) if isinstance(c, int))


def estimate_waste(finding: Finding, schedule: GasSchedule = DEFAULT_SCHEDULE,
                   assumed_iterations: int = 10, result: ExplorationResult | None = None) -> int | None:
    """Gas saved per execution by removing the pattern instance.

    Dead code has no per-execution cost (its byte count is in the evidence) and
    returns None. Opaque predicates cost their comparison chain plus the JUMPI,
    at least 13. A loop op costs ``(iterations - 1) * op_cost``: the loop
    executes it every iteration where a hoisted version executes it once.
    """
    if finding.kind == PatternKind.DeadCode:
        return None
    if finding.kind == PatternKind.OpaquePredicate:
        if result is None:
            return MIN_OPAQUE_SAVING
        return max(MIN_OPAQUE_SAVING, _condition_cost(result, finding))
    if finding.kind == PatternKind.ExpensiveLoopOp:
        cost = loop_op_cost(finding.evidence["opcode"], schedule)
        return max(0, assumed_iterations * cost - cost)
    return None


def with_estimates(findings: Iterable[Finding], result: ExplorationResult,
                   schedule: GasSchedule = DEFAULT_SCHEDULE, assumed_iterations: int = 10) -> list[Finding]:
    out = []
    for f in findings:
        est = estimate_waste(f, schedule, assumed_iterations, result)
        out.append(Finding(f.kind, f.block, f.start, f.end, f.evidence, f.confidence, est))
    return out


def detect_all(result: ExplorationResult, rule: MembershipRule = "latch", strict: bool = False,
               schedule: GasSchedule = DEFAULT_SCHEDULE, assumed_iterations: int = 10) -> list[Finding]:
    found = detect_dead_code(result) + detect_opaque_predicates(result)
    found += detect_expensive_loop_ops(result, rule, strict)
    return sorted(with_estimates(found, result, schedule, assumed_iterations), key=Finding.sort_key)
