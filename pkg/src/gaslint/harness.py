"""Per-contract analysis pipeline, corpus batch runs and statistics export."""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

from . import __version__
from .cfg import MembershipRule
from .constraints import FeasibilityChecker, SolverConfig
from .detectors import Finding, PatternKind, detect_all
from .evm import DEFAULT_SCHEDULE, GasSchedule, InputError, load_bytecode
from .symexec import ExplorationLimits, ExplorationResult, SymbolicExecutor

log = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"
TIMING_FIELDS = ("wall_time",)


@dataclass
class AnalysisConfig:
    limits: ExplorationLimits = field(default_factory=ExplorationLimits)
    solver: SolverConfig | None = None
    strict_loops: bool = False
    loop_rule: MembershipRule = "latch"
    assumed_iterations: int = 10
    schedule: GasSchedule = DEFAULT_SCHEDULE
    trace: bool = False

    def __post_init__(self) -> None:
        if self.assumed_iterations < 2:
            raise ValueError("assumed_iterations must be at least 2")


def contract_id(code: bytes) -> str:
    return hashlib.sha256(code).hexdigest()


@dataclass
class AnalysisReport:
    contract_id: str
    byte_size: int
    findings: list[Finding]
    complete: bool
    path_count: int
    visited_block_count: int
    total_block_count: int
    wall_time: float
    limits: dict[str, Any]
    diagnostics: list[dict[str, Any]] = field(default_factory=list)
    tool_version: str = __version__
    result: ExplorationResult | None = field(default=None, repr=False, compare=False)

    def count(self, kind: PatternKind, opcode: str | None = None) -> int:
        return sum(
            1 for f in self.findings
            if f.kind == kind and (opcode is None or f.evidence.get("opcode") == opcode)
        )

    @property
    def has_findings(self) -> bool:
        return bool(self.findings)

    def to_dict(self, timing: bool = True) -> dict[str, Any]:
        exploration: dict[str, Any] = {
            "complete": self.complete,
            "path_count": self.path_count,
            "visited_block_count": self.visited_block_count,
            "total_block_count": self.total_block_count,
        }
        if timing:
            exploration["wall_time"] = round(self.wall_time, 6)
        return {
            "schema_version": SCHEMA_VERSION,
            "tool_version": self.tool_version,
            "contract_id": self.contract_id,
            "byte_size": self.byte_size,
            "findings": [f.to_dict() for f in self.findings],
            "exploration": exploration,
            "limits": self.limits,
            "diagnostics": self.diagnostics,
        }

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True) + "\n"


_FINDING_SCHEMA = {
    "type": "object",
    "required": ["kind", "kind_name", "block", "start", "end", "evidence", "confidence", "est_waste_gas"],
    "properties": {
        "kind": {"type": "integer", "minimum": 1, "maximum": 7},
        "kind_name": {"enum": [k.name for k in PatternKind]},
        "block": {"type": "integer", "minimum": 0},
        "start": {"type": "integer", "minimum": 0},
        "end": {"type": "integer", "minimum": 0},
        "evidence": {"type": "object"},
        "confidence": {"enum": ["proven", "heuristic"]},
        "est_waste_gas": {"type": ["integer", "null"], "minimum": 0},
    },
}

REPORT_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "AnalysisReport",
    "type": "object",
    "required": ["schema_version", "tool_version", "contract_id", "byte_size", "findings",
                 "exploration", "limits", "diagnostics"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "tool_version": {"type": "string"},
        "contract_id": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        "byte_size": {"type": "integer", "minimum": 0},
        "findings": {"type": "array", "items": _FINDING_SCHEMA},
        "exploration": {
            "type": "object",
            "required": ["complete", "path_count", "visited_block_count", "total_block_count"],
            "properties": {
                "complete": {"type": "boolean"},
                "path_count": {"type": "integer", "minimum": 0},
                "visited_block_count": {"type": "integer", "minimum": 0},
                "total_block_count": {"type": "integer", "minimum": 0},
                "wall_time": {"type": "number", "minimum": 0},
            },
        },
        "limits": {"type": "object"},
        "diagnostics": {"type": "array"},
    },
}


def analyze_one(code: bytes, config: AnalysisConfig | None = None,
                checker: FeasibilityChecker | None = None) -> AnalysisReport:
    """Explore one contract and run all detectors over the result."""
    config = config or AnalysisConfig()
    checker = checker or FeasibilityChecker(solver=config.solver)
    started = time.monotonic()
    ex = SymbolicExecutor(code, config.limits, checker, config.schedule, trace=config.trace)
    res = ex.explore()
    findings = detect_all(res, config.loop_rule, config.strict_loops, config.schedule,
                          config.assumed_iterations)
    return AnalysisReport(
        contract_id=contract_id(code),
        byte_size=len(code),
        findings=findings,
        complete=res.complete,
        path_count=res.path_count,
        visited_block_count=len(res.visited_blocks),
        total_block_count=len(res.final_cfg.blocks),
        wall_time=time.monotonic() - started,
        limits=config.limits.as_dict(),
        diagnostics=[{"pc": d.pc, "kind": d.kind, "detail": d.detail} for d in res.diagnostics],
        result=res,
    )


def read_code(path: str | os.PathLike) -> bytes:
    """Read a bytecode file (hex text or raw). Raises InputError."""
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return load_bytecode(data)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from exc


def analyze_file(path: str | os.PathLike, config: AnalysisConfig | None = None) -> AnalysisReport:
    return analyze_one(read_code(path), config)


# --- batch -------------------------------------------------------------------------


ANALYZED = "analyzed"
DUPLICATE = "duplicate"
EMPTY = "empty"
FAILED = "failed"


@dataclass
class BatchEntry:
    source: str
    status: str
    contract_id: str | None = None
    error: str | None = None


HISTOGRAMS = ("dead_blocks", "opaque_predicates", "sload_in_loop", "sstore_in_loop", "balance_in_loop")


def _histogram_value(report: AnalysisReport, name: str) -> int:
    if name == "dead_blocks":
        return report.count(PatternKind.DeadCode)
    if name == "opaque_predicates":
        return report.count(PatternKind.OpaquePredicate)
    opcode = name.split("_", 1)[0].upper()
    return report.count(PatternKind.ExpensiveLoopOp, opcode)


@dataclass
class CorpusStats:
    contracts_total: int = 0
    contracts_analyzed: int = 0
    contracts_failed: int = 0
    contracts_duplicate: int = 0
    contracts_empty: int = 0
    prevalence: dict[str, int] = field(default_factory=dict)
    histograms: dict[str, dict[int, int]] = field(default_factory=dict)
    size_pairs: list[dict[str, Any]] = field(default_factory=list)

    def percentage(self, kind: str) -> float:
        if not self.contracts_analyzed:
            return 0.0
        return 100.0 * self.prevalence.get(kind, 0) / self.contracts_analyzed

    def to_dict(self) -> dict[str, Any]:
        return {
            "contracts_total": self.contracts_total,
            "contracts_analyzed": self.contracts_analyzed,
            "contracts_failed": self.contracts_failed,
            "contracts_duplicate": self.contracts_duplicate,
            "contracts_empty": self.contracts_empty,
            "prevalence": {
                k: {"contracts": self.prevalence.get(k, 0), "percent": round(self.percentage(k), 4)}
                for k in _PREVALENCE_KINDS
            },
            "histograms": {
                name: {str(b): n for b, n in sorted(self.histograms.get(name, {}).items())}
                for name in HISTOGRAMS
            },
            "size_pairs": self.size_pairs,
        }


_PREVALENCE_KINDS = tuple(k.name for k in PatternKind if k <= PatternKind.ExpensiveLoopOp)


def compute_stats(reports: Iterable[AnalysisReport], entries: Iterable[BatchEntry]) -> CorpusStats:
    entries = list(entries)
    reports = sorted(reports, key=lambda r: r.contract_id)
    st = CorpusStats(contracts_total=len(entries))
    for e in entries:
        if e.status == FAILED:
            st.contracts_failed += 1
        elif e.status == DUPLICATE:
            st.contracts_duplicate += 1
        elif e.status == EMPTY:
            st.contracts_empty += 1
    st.contracts_analyzed = len(reports)
    st.prevalence = {k: 0 for k in _PREVALENCE_KINDS}
    st.histograms = {name: {} for name in HISTOGRAMS}
    for r in reports:
        for k in _PREVALENCE_KINDS:
            if r.count(PatternKind[k]):
                st.prevalence[k] += 1
        pair: dict[str, Any] = {"contract_id": r.contract_id, "byte_size": r.byte_size}
        for name in HISTOGRAMS:
            v = _histogram_value(r, name)
            pair[name] = v
            # contracts without the pattern are not counted
            if v:
                hist = st.histograms[name]
                hist[v] = hist.get(v, 0) + 1
        st.size_pairs.append(pair)
    st.size_pairs.sort(key=lambda p: (p["byte_size"], p["contract_id"]))
    return st


@dataclass
class BatchResult:
    stats: CorpusStats
    reports: dict[str, AnalysisReport]
    entries: list[BatchEntry]


def list_inputs(target: str | os.PathLike) -> list[Path]:
    """Files of a directory (sorted, hidden files skipped) or the paths in a manifest.

    A manifest is a text file with one path per line, relative to the
    manifest's directory; blank lines and ``#`` comments are ignored.
    """
    p = Path(target)
    if p.is_dir():
        return sorted(f for f in p.iterdir() if f.is_file() and not f.name.startswith("."))
    if p.is_file():
        out = []
        for line in p.read_text().splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                q = Path(line)
                out.append(q if q.is_absolute() else p.parent / q)
        return out
    raise InputError(f"{target}: no such directory or manifest")


def analyze_batch(target: str | os.PathLike, config: AnalysisConfig | None = None) -> BatchResult:
    """Analyze every distinct non-empty bytecode once; failures never abort the batch."""
    config = config or AnalysisConfig()
    checker = FeasibilityChecker(solver=config.solver)
    entries: list[BatchEntry] = []
    reports: dict[str, AnalysisReport] = {}
    for path in list_inputs(target):
        name = str(path)
        try:
            code = read_code(path)
        except InputError as exc:
            log.warning("skipping %s", exc)
            entries.append(BatchEntry(name, FAILED, error=str(exc)))
            continue
        cid = contract_id(code)
        if not code:
            entries.append(BatchEntry(name, EMPTY, cid))
            continue
        if cid in reports or any(e.contract_id == cid and e.status == FAILED for e in entries):
            entries.append(BatchEntry(name, DUPLICATE, cid))
            continue
        try:
            reports[cid] = analyze_one(code, config, checker)
        except Exception as exc:  # one bad contract must not sink the batch
            log.exception("analysis of %s failed", name)
            entries.append(BatchEntry(name, FAILED, cid, f"{type(exc).__name__}: {exc}"))
            continue
        entries.append(BatchEntry(name, ANALYZED, cid))
    return BatchResult(compute_stats(reports.values(), entries), reports, entries)


CSV_HEADER = ("histogram", "bucket", "contracts")


def export_stats(stats: CorpusStats, csv_path: str | os.PathLike | None = None,
                 json_path: str | os.PathLike | None = None) -> list[Path]:
    """Write the histogram CSV (one row per bucket) and/or the full JSON."""
    written = []
    if csv_path is not None:
        p = Path(csv_path)
        with p.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for name in HISTOGRAMS:
                for bucket, n in sorted(stats.histograms.get(name, {}).items()):
                    w.writerow((name, bucket, n))
        written.append(p)
    if json_path is not None:
        p = Path(json_path)
        p.write_text(json.dumps(stats.to_dict(), indent=2, sort_keys=True) + "\n")
        written.append(p)
    return written
