import json

import pytest
from click.testing import CliRunner
from conftest import BALLOT_ADDRESS, CORPUS, EMPTY_ADDRESS, ERROR_ADDRESS, GOLDEN, Z3, needs_z3

from gaslint.cli import main


@pytest.fixture
def cli():
    runner = CliRunner()
    return lambda *args: runner.invoke(main, [str(a) for a in args])


def test_version(cli):
    r = cli("--version")
    assert r.exit_code == 0 and "0.1.0" in r.output


def test_clean_contract_exits_zero(cli):
    r = cli("analyze", CORPUS / "loop_free_control.hex")
    assert r.exit_code == 0, r.output
    assert "no findings" in r.output


def test_findings_exit_zero_without_gate(cli):
    r = cli("analyze", CORPUS / "p1_false_guard.hex")
    assert r.exit_code == 0
    assert "DeadCode" in r.output and "OpaquePredicate" in r.output


def test_fail_on_findings(cli):
    assert cli("analyze", CORPUS / "p1_false_guard.hex", "--fail-on-findings").exit_code == 1
    assert cli("analyze", CORPUS / "loop_free_control.hex", "--fail-on-findings").exit_code == 0


def test_input_errors_exit_two(cli, tmp_path):
    assert cli("analyze", CORPUS / "corrupt.hex").exit_code == 2
    assert cli("analyze", tmp_path / "missing.hex").exit_code == 2
    assert cli("fetch", "0x1234", "--rpc", "http://127.0.0.1:9/").exit_code == 2


def test_bad_iterations_rejected(cli):
    assert cli("analyze", CORPUS / "loop_sload.hex", "--iterations", "1").exit_code == 2


def test_incomplete_exits_four(cli):
    r = cli("analyze", CORPUS / "ballot.hex")
    assert r.exit_code == 4
    assert "INCOMPLETE" in r.output and "SLOAD in loop" in r.output


def test_tight_limits_make_exploration_incomplete(cli):
    assert cli("analyze", CORPUS / "accumulator.hex", "--max-loop-visits", "2").exit_code == 4


def test_json_and_dot_outputs(cli, tmp_path):
    j, d = tmp_path / "r.json", tmp_path / "g.dot"
    r = cli("analyze", CORPUS / "p1_false_guard.hex", "--json", j, "--dot", d)
    assert r.exit_code == 0
    doc = json.loads(j.read_text())
    assert doc["schema_version"] == "1.0" and len(doc["findings"]) == 2
    dot = d.read_text()
    assert dot.startswith("digraph cfg") and "style=dashed" in dot


def test_gas_price_display(cli):
    r = cli("analyze", CORPUS / "loop_sload.hex", "--gas-price", "2e-8", "--iterations", "5")
    assert "~800 gas (1.6e-05 ether)" in r.output


def test_strict_loops_flag(cli):
    r = cli("analyze", CORPUS / "loop_sload.hex", "--strict-loops")
    assert r.exit_code == 0 and "SLOAD in loop" in r.output


def test_batch_outputs(cli, tmp_path):
    csv_path, stats, reports, figs = tmp_path / "h.csv", tmp_path / "s.json", tmp_path / "rep", tmp_path / "fig"
    r = cli("batch", CORPUS, "--csv", csv_path, "--json", stats, "--reports", reports, "--figures", figs)
    assert r.exit_code == 0, r.output
    assert "13 total, 10 analyzed, 1 duplicate, 1 empty, 1 failed" in r.output
    assert csv_path.read_bytes() == (GOLDEN / "corpus_histograms.csv").read_bytes()
    assert json.loads(stats.read_text())["contracts_failed"] == 1
    assert len(list(reports.glob("*.json"))) == 10
    pngs = sorted(p.name for p in figs.glob("*.png"))
    assert "size_vs_findings.png" in pngs and len(pngs) == 6
    assert all((figs / p).read_bytes()[:8] == b"\x89PNG\r\n\x1a\n" for p in pngs)


def test_batch_fail_on_findings(cli):
    assert cli("batch", CORPUS, "--fail-on-findings").exit_code == 1


def test_batch_missing_target(cli, tmp_path):
    assert cli("batch", tmp_path / "nope").exit_code == 2


def test_verbose_trace(cli):
    r = CliRunner().invoke(main, ["analyze", str(CORPUS / "loop_free_control.hex"), "-vv"])
    assert r.exit_code == 0


@needs_z3
def test_external_solver_flag(cli):
    r = cli("analyze", CORPUS / "self_compare.hex", "--solver", Z3, "--solver-timeout", "5")
    assert r.exit_code == 0 and "OpaquePredicate" in r.output


def test_fetch_prints_code(cli, rpc_server):
    _, url = rpc_server
    r = cli("fetch", BALLOT_ADDRESS, "--rpc", url)
    assert r.exit_code == 0 and r.output.strip() == (CORPUS / "ballot.hex").read_text().strip()


def test_fetch_and_analyze(cli, rpc_server, tmp_path):
    _, url = rpc_server
    out, j = tmp_path / "c.hex", tmp_path / "r.json"
    r = cli("fetch", BALLOT_ADDRESS, "--rpc", url, "--out", out, "--analyze", "--json", j)
    assert r.exit_code == 4  # ballot exploration hits the loop bound
    assert out.read_text().startswith("0x")
    assert json.loads(j.read_text())["byte_size"] > 0


def test_fetch_empty_account(cli, rpc_server):
    _, url = rpc_server
    r = cli("fetch", EMPTY_ADDRESS, "--rpc", url, "--analyze")
    assert r.exit_code == 0 and "no code" in r.output


def test_fetch_rpc_failure_exits_three(cli, rpc_server):
    _, url = rpc_server
    r = cli("fetch", ERROR_ADDRESS, "--rpc", url)
    assert r.exit_code == 3 and "retriable" in r.output
