"""Corpus distribution plots rendered to PNG files."""

from __future__ import annotations

import os
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .harness import HISTOGRAMS, CorpusStats  # noqa: E402

_TITLES = {
    "dead_blocks": "Dead code blocks per contract",
    "opaque_predicates": "Opaque predicates per contract",
    "sload_in_loop": "SLOAD in a loop per contract",
    "sstore_in_loop": "SSTORE in a loop per contract",
    "balance_in_loop": "BALANCE in a loop per contract",
}


def _histogram(name: str, hist: dict[int, int], path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    buckets = sorted(hist)
    ax.bar([str(b) for b in buckets], [hist[b] for b in buckets], color="#4c72b0")
    ax.set_title(_TITLES[name])
    ax.set_xlabel("instances")
    ax.set_ylabel("contracts")
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)


def _size_scatter(stats: CorpusStats, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    sizes = [p["byte_size"] for p in stats.size_pairs]
    for name, marker in (("dead_blocks", "o"), ("opaque_predicates", "s")):
        ax.scatter(sizes, [p[name] for p in stats.size_pairs], marker=marker, label=name, alpha=0.7)
    ax.set_xlabel("bytecode size (bytes)")
    ax.set_ylabel("instances")
    ax.set_title("Pattern instances vs. contract size")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)


def render_figures(stats: CorpusStats, out_dir: str | os.PathLike) -> list[Path]:
    """One bar chart per histogram plus a size scatter. Returns written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name in HISTOGRAMS:
        p = out / f"{name}.png"
        _histogram(name, stats.histograms.get(name, {}), p)
        written.append(p)
    p = out / "size_vs_findings.png"
    _size_scatter(stats, p)
    written.append(p)
    return written
