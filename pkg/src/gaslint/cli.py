"""Command-line front end: ``gaslint analyze | batch | fetch``."""

from __future__ import annotations

import functools
import logging
import sys
from pathlib import Path
from typing import Any, Callable

import click

from . import __version__
from .constraints import SolverConfig
from .detectors import Finding
from .evm import InputError
from .harness import AnalysisConfig, AnalysisReport, analyze_batch, analyze_one, export_stats, read_code
from .rpc import RpcError, fetch_code
from .symexec import ExplorationLimits

EXIT_CLEAN = 0
EXIT_FINDINGS = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3
EXIT_INCOMPLETE = 4


def _analysis_options(fn: Callable) -> Callable:
    opts = [
        click.option("--solver", metavar="EXE", help="External SMT solver reading SMT-LIB on stdin (e.g. z3)."),
        click.option("--solver-timeout", type=float, default=1.0, show_default=True, help="Seconds per solver query."),
        click.option("--max-depth", type=int, default=64, show_default=True, help="Branch points per path."),
        click.option("--max-paths", type=int, default=4096, show_default=True),
        click.option("--max-loop-visits", type=int, default=8, show_default=True, help="Visits per block per path."),
        click.option("--time-budget", type=float, default=60.0, show_default=True, help="Seconds per contract."),
        click.option("--strict-loops", is_flag=True, help="Only report loop ops inside the natural loop too."),
        click.option("--iterations", "assumed_iterations", type=int, default=10, show_default=True,
                     help="Assumed loop iterations for waste estimates."),
        click.option("--gas-price", type=float, default=None, metavar="ETHER",
                     help="Ether per gas unit, used only to display costs."),
        click.option("--fail-on-findings", is_flag=True, help="Exit with status 1 when anything is found."),
        click.option("-v", "--verbose", count=True, help="-v for progress, -vv adds the per-instruction trace."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _make_config(kw: dict[str, Any]) -> AnalysisConfig:
    level = {0: logging.WARNING, 1: logging.INFO}.get(kw["verbose"], logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    solver = SolverConfig.from_cli(kw["solver"], kw["solver_timeout"]) if kw["solver"] else None
    limits = ExplorationLimits(
        max_depth=kw["max_depth"],
        max_paths=kw["max_paths"],
        max_loop_visits=kw["max_loop_visits"],
        time_budget=kw["time_budget"],
        solver_budget=kw["solver_timeout"],
    )
    try:
        return AnalysisConfig(limits=limits, solver=solver, strict_loops=kw["strict_loops"],
                              assumed_iterations=kw["assumed_iterations"], trace=kw["verbose"] >= 2)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from exc


def _guard(fn: Callable) -> Callable:
    """Map input problems to exit 2 and unexpected failures to exit 3."""

    @functools.wraps(fn)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return fn(*args, **kwargs)
        except (InputError, FileNotFoundError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_INPUT)
        except RpcError as exc:
            click.echo(f"error (retriable): {exc}", err=True)
            sys.exit(EXIT_INTERNAL)
        except (click.ClickException, SystemExit, KeyboardInterrupt):
            raise
        except Exception as exc:
            logging.getLogger(__name__).debug("internal error", exc_info=True)
            click.echo(f"internal error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(EXIT_INTERNAL)

    return wrapper


def _format_finding(f: Finding, gas_price: float | None) -> str:
    ev = f.evidence
    if f.kind.name == "DeadCode":
        what = f"{ev['dead_bytes']} dead bytes"
    elif f.kind.name == "OpaquePredicate":
        what = f"{ev['never_taken']} branch never taken ({ev['proof_source']})"
    else:
        what = f"{ev['opcode']} in loop at {ev['loop_header']:#06x}"
    line = f"  {f.kind.name:<16} {f.start:#06x}-{f.end:#06x}  {f.confidence:<9}  {what}"
    if f.est_waste_gas is not None:
        line += f"  ~{f.est_waste_gas} gas"
        if gas_price is not None:
            line += f" ({f.est_waste_gas * gas_price:.12g} ether)"
    return line


def _print_report(name: str, rep: AnalysisReport, gas_price: float | None) -> None:
    state = "complete" if rep.complete else "INCOMPLETE"
    click.echo(f"{name}: {rep.byte_size} bytes, {rep.visited_block_count}/{rep.total_block_count} blocks "
               f"visited, {rep.path_count} paths, exploration {state}")
    for f in rep.findings:
        click.echo(_format_finding(f, gas_price))
    if not rep.findings:
        click.echo("  no findings")
    for d in rep.diagnostics:
        where = f"{d['pc']:#06x}" if d["pc"] >= 0 else "-"
        click.echo(f"  diagnostic {d['kind']} at {where} {d['detail']}".rstrip())


@click.group()
@click.version_option(__version__, prog_name="gaslint")
def main() -> None:
    """Detect gas-costly patterns in EVM bytecode."""


@main.command()
@click.argument("file", type=click.Path(dir_okay=False, path_type=Path))
@click.option("--json", "json_path", type=click.Path(dir_okay=False, path_type=Path), help="Write the JSON report.")
@click.option("--dot", "dot_path", type=click.Path(dir_okay=False, path_type=Path), help="Write the CFG as DOT.")
@_analysis_options
@_guard
def analyze(file: Path, json_path: Path | None, dot_path: Path | None, **kw: Any) -> None:
    """Analyze one bytecode file (hex text or raw binary).

    Exit status: 0 clean, 1 findings (with --fail-on-findings), 2 input error,
    3 internal error, 4 exploration incomplete.
    """
    config = _make_config(kw)
    code = read_code(file)
    rep = analyze_one(code, config)
    _print_report(str(file), rep, kw["gas_price"])
    if json_path is not None:
        json_path.write_text(rep.to_json())
    if dot_path is not None and rep.result is not None:
        dot_path.write_text(rep.result.final_cfg.to_dot(rep.result.visited_blocks))
    if kw["fail_on_findings"] and rep.has_findings:
        sys.exit(EXIT_FINDINGS)
    if not rep.complete:
        sys.exit(EXIT_INCOMPLETE)


@main.command()
@click.argument("target", type=click.Path(exists=True, path_type=Path))
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False, path_type=Path), help="Histogram CSV.")
@click.option("--json", "json_path", type=click.Path(dir_okay=False, path_type=Path), help="Corpus statistics JSON.")
@click.option("--reports", "reports_dir", type=click.Path(file_okay=False, path_type=Path),
              help="Directory for per-contract JSON reports.")
@click.option("--figures", "figures_dir", type=click.Path(file_okay=False, path_type=Path),
              help="Directory for PNG distribution plots.")
@_analysis_options
@_guard
def batch(target: Path, csv_path: Path | None, json_path: Path | None, reports_dir: Path | None,
          figures_dir: Path | None, **kw: Any) -> None:
    """Analyze a directory of bytecode files or a manifest listing them."""
    config = _make_config(kw)
    res = analyze_batch(target, config)
    st = res.stats
    click.echo(f"contracts: {st.contracts_total} total, {st.contracts_analyzed} analyzed, "
               f"{st.contracts_duplicate} duplicate, {st.contracts_empty} empty, {st.contracts_failed} failed")
    for kind, n in st.prevalence.items():
        click.echo(f"  {kind:<16} {n:>5} contracts ({st.percentage(kind):.1f}%)")
    for e in res.entries:
        if e.error:
            click.echo(f"  failed: {e.error}", err=True)
    export_stats(st, csv_path, json_path)
    if reports_dir is not None:
        reports_dir.mkdir(parents=True, exist_ok=True)
        for cid, rep in sorted(res.reports.items()):
            (reports_dir / f"{cid}.json").write_text(rep.to_json())
    if figures_dir is not None:
        from .figures import render_figures

        render_figures(st, figures_dir)
    if kw["fail_on_findings"] and any(r.has_findings for r in res.reports.values()):
        sys.exit(EXIT_FINDINGS)


@main.command()
@click.argument("address")
@click.option("--rpc", "rpc_url", required=True, help="Ethereum JSON-RPC endpoint URL.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False, path_type=Path), help="Save the code as hex.")
@click.option("--analyze", "run_analysis", is_flag=True, help="Analyze the fetched code.")
@click.option("--json", "json_path", type=click.Path(dir_okay=False, path_type=Path), help="Write the JSON report.")
@_analysis_options
@_guard
def fetch(address: str, rpc_url: str, out_path: Path | None, run_analysis: bool, json_path: Path | None,
          **kw: Any) -> None:
    """Download deployed code with eth_getCode at the latest block."""
    config = _make_config(kw)
    code = fetch_code(rpc_url, address)
    if not code:
        click.echo(f"{address}: no code at this address")
        return
    if out_path is not None:
        out_path.write_text("0x" + code.hex() + "\n")
    if not run_analysis:
        if out_path is None:
            click.echo("0x" + code.hex())
        return
    rep = analyze_one(code, config)
    _print_report(address, rep, kw["gas_price"])
    if json_path is not None:
        json_path.write_text(rep.to_json())
    if kw["fail_on_findings"] and rep.has_findings:
        sys.exit(EXIT_FINDINGS)
    if not rep.complete:
        sys.exit(EXIT_INCOMPLETE)


if __name__ == "__main__":  # pragma: no cover
    main()
