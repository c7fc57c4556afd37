import io
import json
import subprocess
import sys

import pytest

from jkmirror.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    lines = [json.loads(x) for x in out.getvalue().splitlines()]
    return code, lines


def test_identity_lines():
    code, lines = run("identity", "--k", "1", "--jmax", "10")
    assert code == 0
    assert len(lines) == 11
    assert all(l["status"] == "ok" for l in lines)
    assert set(lines[0]) == {"command", "params", "status", "data", "elapsed_ms"}


def test_mmp_output():
    code, lines = run("mmp", "--k", "1")
    assert code == 0
    th = next(l for l in lines if "thresholds" in l["data"])
    assert th["data"]["thresholds"] == ["1/2", "5/8", "2/3"]


@pytest.mark.parametrize("argv", [["all", "--k", "0"], ["identity", "--bogus"], ["ode", "--prec", "10"]])
def test_usage_errors_exit_2(argv):
    code, _ = run(*argv)
    assert code == 2


def test_runtime_error_is_reported():
    code, lines = run("period", "--k", "1", "--alpha", "1e-3")
    assert code == 1
    assert lines[-1]["status"] == "error"


@pytest.mark.parametrize("cmd", ["delta-check", "subst-check", "bcm", "ode", "relations-check", "conic-check"])
def test_subcommands_ok(cmd):
    code, lines = run(cmd, "--k", "1")
    assert code == 0, lines


def test_count_brute_comparison():
    code, lines = run("count", "--k", "2", "--q", "5", "--alpha", "2")
    assert code == 0
    assert lines[0]["data"]["count"] == lines[0]["data"]["brute"]


def test_table_format():
    out = io.StringIO()
    assert main(["delta-check", "--k", "1", "--format", "table"], out) == 0
    assert out.getvalue().startswith("ok")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "jkmirror", "identity", "--k", "1", "--jmax", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert len(proc.stdout.splitlines()) == 4


def test_budget_skips():
    out = io.StringIO()
    main(["all", "--k", "1", "--budget-seconds", "0"], out)
    statuses = {json.loads(x)["status"] for x in out.getvalue().splitlines()}
    assert "skipped" in statuses
