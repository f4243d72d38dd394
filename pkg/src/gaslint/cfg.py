"""Basic blocks, the control-flow graph, back edges and loop membership.

Block ids are start offsets. The graph starts from statically resolvable
edges and is refined by the symbolic executor through :func:`record_edge`.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Iterable, Literal

from .evm import Instruction

FALLTHROUGH = "fallthrough"
JUMP = "jump"
BRANCH_TRUE = "branch_true"
BRANCH_FALSE = "branch_false"
EDGE_LABELS = (FALLTHROUGH, JUMP, BRANCH_TRUE, BRANCH_FALSE)

_DOT_LABEL = {FALLTHROUGH: "fallthrough", JUMP: "jump", BRANCH_TRUE: "true", BRANCH_FALSE: "false"}


class CfgError(ValueError):
    pass


@dataclass(frozen=True)
class BasicBlock:
    start_offset: int
    end_offset: int
    instructions: tuple[Instruction, ...]
    terminator_kind: str

    @property
    def id(self) -> int:
        return self.start_offset

    @property
    def byte_size(self) -> int:
        return sum(i.size for i in self.instructions)

    @property
    def last(self) -> Instruction:
        return self.instructions[-1]

    def __str__(self) -> str:
        return f"block {self.start_offset:#x}-{self.end_offset:#x}"


def _terminator_kind(ins: Instruction) -> str:
    if ins.truncated:
        return "truncated"
    if ins.opcode.is_unknown:
        return "unknown"
    return {
        "JUMP": "jump",
        "JUMPI": "cond_jump",
        "STOP": "stop",
        "RETURN": "return",
        "SELFDESTRUCT": "selfdestruct",
    }.get(ins.name, "fallthrough")


def build_blocks(instructions: list[Instruction]) -> list[BasicBlock]:
    """Split instructions into basic blocks, ordered by offset.

    Leaders: the first instruction, every JUMPDEST and every instruction after
    a terminator (jumps, halts, UNKNOWN, truncated PUSH).
    """
    blocks: list[BasicBlock] = []
    cur: list[Instruction] = []

    def close() -> None:
        if cur:
            blocks.append(BasicBlock(cur[0].offset, cur[-1].offset, tuple(cur), _terminator_kind(cur[-1])))
            cur.clear()

    for ins in instructions:
        if ins.name == "JUMPDEST":
            close()
        cur.append(ins)
        if ins.is_terminator():
            close()
    close()
    return blocks


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    label: str


@dataclass
class Cfg:
    blocks: dict[int, BasicBlock] = field(default_factory=dict)
    edges: set[Edge] = field(default_factory=set)
    # (src block, target offset, label) for jumps to something that is not a JUMPDEST
    invalid_targets: set[tuple[int, int, str]] = field(default_factory=set)

    @property
    def root(self) -> int | None:
        return 0 if 0 in self.blocks else None

    def successors(self, block: int) -> list[int]:
        return sorted({e.dst for e in self.edges if e.src == block})

    def predecessors(self, block: int) -> list[int]:
        return sorted({e.src for e in self.edges if e.dst == block})

    def adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, set[int]] = {b: set() for b in self.blocks}
        for e in self.edges:
            adj[e.src].add(e.dst)
        return {b: sorted(s) for b, s in adj.items()}

    def block_at(self, offset: int) -> BasicBlock | None:
        return self.blocks.get(offset)

    def is_jumpdest(self, offset: int) -> bool:
        b = self.blocks.get(offset)
        return b is not None and b.instructions[0].name == "JUMPDEST"

    def to_dot(self, visited: Iterable[int] | None = None) -> str:
        seen = set(visited) if visited is not None else None
        lines = ["digraph cfg {", "  node [shape=box, fontname=monospace];"]
        for b in sorted(self.blocks):
            blk = self.blocks[b]
            style = ""
            if seen is not None and b not in seen:
                style = ", style=dashed"
            lines.append(f'  b{b} [label="{blk.start_offset:#06x}-{blk.end_offset:#06x}"{style}];')
        for e in sorted(self.edges, key=lambda e: (e.src, e.dst, e.label)):
            lines.append(f'  b{e.src} -> b{e.dst} [label="{_DOT_LABEL[e.label]}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def initial_cfg(blocks: Iterable[BasicBlock]) -> Cfg:
    cfg = Cfg({b.id: b for b in blocks})
    order = sorted(cfg.blocks)
    for idx, b in enumerate(order):
        blk = cfg.blocks[b]
        nxt = order[idx + 1] if idx + 1 < len(order) else None
        kind = blk.terminator_kind
        if nxt is not None and kind == "fallthrough":
            cfg.edges.add(Edge(b, nxt, FALLTHROUGH))
        if kind == "cond_jump" and nxt is not None:
            cfg.edges.add(Edge(b, nxt, BRANCH_FALSE))
        if kind in ("jump", "cond_jump") and len(blk.instructions) >= 2:
            prev = blk.instructions[-2]
            if prev.opcode.pushed_bytes and not prev.truncated:
                label = JUMP if kind == "jump" else BRANCH_TRUE
                if cfg.is_jumpdest(prev.operand):
                    cfg.edges.add(Edge(b, prev.operand, label))
                else:
                    cfg.invalid_targets.add((b, prev.operand, label))
    return cfg


def record_edge(cfg: Cfg, src: int, dst: int, label: str) -> Cfg:
    """Add an edge discovered during exploration. Idempotent."""
    if src not in cfg.blocks or dst not in cfg.blocks:
        raise CfgError(f"edge endpoints must be blocks: {src:#x} -> {dst:#x}")
    if label not in EDGE_LABELS:
        raise CfgError(f"unknown edge label {label!r}")
    edge = Edge(src, dst, label)
    if edge in cfg.edges:
        return cfg
    if label in (BRANCH_TRUE, BRANCH_FALSE):
        if cfg.blocks[src].terminator_kind != "cond_jump":
            raise CfgError(f"{label} edge from non-conditional block {src:#x}")
        for e in cfg.edges:
            if e.src == src and e.label == label:
                raise CfgError(f"block {src:#x} already has a {label} edge to {e.dst:#x}")
    cfg.edges.add(edge)
    return cfg


def cfg_from_bytecode(bytecode: bytes) -> Cfg:
    from .evm import decode

    return initial_cfg(build_blocks(decode(bytecode)))


# --- loops ---------------------------------------------------------------------


def find_back_edges(cfg: Cfg) -> list[tuple[int, int]]:
    """Edges (u, v) where v is a DFS ancestor of u (successors in offset order)."""
    root = cfg.root
    if root is None:
        return []
    adj = cfg.adjacency()
    on_stack = {root}
    done: set[int] = set()
    back: list[tuple[int, int]] = []
    stack = [(root, iter(adj[root]))]
    while stack:
        node, it = stack[-1]
        for nxt in it:
            if nxt in on_stack:
                back.append((node, nxt))
            elif nxt not in done:
                on_stack.add(nxt)
                stack.append((nxt, iter(adj[nxt])))
                break
        else:
            stack.pop()
            on_stack.discard(node)
            done.add(node)
    return back


def shortest_distances(cfg: Cfg, source: int, directed: bool = False) -> dict[int, float]:
    """Unit-weight Dijkstra distances from ``source``; unreachable blocks map to inf.

    With ``directed=False`` edges are walked both ways.
    """
    adj: dict[int, set[int]] = {b: set() for b in cfg.blocks}
    for e in cfg.edges:
        adj[e.src].add(e.dst)
        if not directed:
            adj[e.dst].add(e.src)
    dist: dict[int, float] = {b: math.inf for b in cfg.blocks}
    dist[source] = 0
    heap = [(0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v in adj[u]:
            if d + 1 < dist[v]:
                dist[v] = d + 1
                heapq.heappush(heap, (d + 1, v))
    return dist


def _reverse_distances(cfg: Cfg, target: int) -> dict[int, float]:
    """Directed distance from every block *to* ``target``."""
    rev = Cfg(cfg.blocks, {Edge(e.dst, e.src, e.label) for e in cfg.edges})
    return shortest_distances(rev, target, directed=True)


def natural_loop(cfg: Cfg, latch: int, header: int) -> frozenset[int]:
    """Blocks that reach the latch without passing through the header, plus the header."""
    body = {header, latch}
    todo = [latch] if latch != header else []
    preds: dict[int, list[int]] = {}
    for e in cfg.edges:
        preds.setdefault(e.dst, []).append(e.src)
    while todo:
        n = todo.pop()
        for p in preds.get(n, ()):
            if p not in body:
                body.add(p)
                todo.append(p)
    return frozenset(body)


MembershipRule = Literal["latch", "exit"]


@dataclass(frozen=True)
class LoopInfo:
    back_edge: tuple[int, int]
    entry_block: int
    exit_block: int | None
    natural_blocks: frozenset[int]
    member_blocks: frozenset[int] = frozenset()

    @property
    def latch(self) -> int:
        return self.back_edge[0]

    @property
    def header(self) -> int:
        return self.back_edge[1]


def identify_loop(cfg: Cfg, back_edge: tuple[int, int]) -> LoopInfo:
    """Entry = back-edge target. Exit = lowest-offset successor of a conditional
    jump in the loop body that lies outside the body (None for endless loops)."""
    latch, header = back_edge
    body = natural_loop(cfg, latch, header)
    cands = sorted(
        e.dst for e in cfg.edges
        if e.src in body and e.dst not in body and cfg.blocks[e.src].terminator_kind == "cond_jump"
    )
    return LoopInfo(back_edge, header, cands[0] if cands else None, body)


def loop_membership(cfg: Cfg, loop: LoopInfo, rule: MembershipRule = "latch") -> frozenset[int]:
    """Blocks closer to the loop's exit reference than to its entry.

    ``rule="latch"`` measures directed distances from each block to the
    back-edge source (the block through which the body exits back to the
    header) and to the header. ``rule="exit"`` measures undirected distances
    to the loop's exit successor and to the header. Both references and the
    entry are always members.
    """
    if rule == "latch":
        ref = loop.latch
        d_ref = _reverse_distances(cfg, ref)
        d_entry = _reverse_distances(cfg, loop.entry_block)
    elif rule == "exit":
        if loop.exit_block is None:
            return frozenset({loop.entry_block})
        ref = loop.exit_block
        d_ref = shortest_distances(cfg, ref)
        d_entry = shortest_distances(cfg, loop.entry_block)
    else:
        raise ValueError(f"unknown membership rule {rule!r}")
    members = {b for b in cfg.blocks if d_ref[b] < d_entry[b]}
    members.update((loop.entry_block, ref))
    return frozenset(members)


def find_loops(cfg: Cfg, rule: MembershipRule = "latch") -> list[LoopInfo]:
    """One LoopInfo per back edge, with membership filled in."""
    out = []
    for be in find_back_edges(cfg):
        info = identify_loop(cfg, be)
        out.append(LoopInfo(info.back_edge, info.entry_block, info.exit_block,
                            info.natural_blocks, loop_membership(cfg, info, rule)))
    return out
