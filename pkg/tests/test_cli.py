"""Command-line surface: run, trace, conform, check, serve."""

from __future__ import annotations

import json
import subprocess
import sys

import pytest

from minireact import deserialize
from minireact.cli import main
from tests.conftest import PROGRAMS


def _run(argv, capsys):
    status = main(argv)
    captured = capsys.readouterr()
    return status, captured.out, captured.err


def test_run_selfcounter(capsys):
    status, out, err = _run(["run", str(PROGRAMS / "selfcounter.rtr")], capsys)
    assert status == 0
    assert out.splitlines() == ["0", "Return", "Effect", "1", "Return",
                                "Effect", "2", "Return", "Effect", "3",
                                "Return", "Effect"]


def test_run_inf_exit_1_names_error(capsys):
    status, out, err = _run(["run", str(PROGRAMS / "inf.rtr")], capsys)
    assert status == 1
    assert "RerenderLimitExceeded" in err
    assert "100" in err
    assert out == ""


def test_run_literal_main_prints_nothing(tmp_path, capsys):
    program = tmp_path / "empty-main-42.rtr"
    program.write_text("42\n")
    status, out, err = _run(["run", str(program)], capsys)
    assert status == 0
    assert out == ""


def test_run_with_events(capsys):
    status, out, _ = _run(["run", str(PROGRAMS / "counter.rtr"),
                           "--events", "0;0"], capsys)
    assert status == 0
    assert out.splitlines() == ["Counter", "Return", "Counter", "Update",
                                "Return", "Counter", "Update", "Return"]


def test_run_budget_flags(capsys):
    status, _, err = _run(["run", str(PROGRAMS / "inf.rtr"),
                           "--rerender-limit", "7"], capsys)
    assert status == 1
    assert "7" in err


def test_run_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.rtr"
    bad.write_text("let C x = ;;")
    status, _, err = _run(["run", str(bad)], capsys)
    assert status == 1
    assert "error" in err


def test_usage_error_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_trace_writes_file_and_replay_matches_run(tmp_path, capsys):
    out_file = tmp_path / "counter.rtrace.json"
    status, _, err = _run(["trace", str(PROGRAMS / "counter.rtr"),
                           "-o", str(out_file), "--events", "0"], capsys)
    assert status == 0
    trace = deserialize(out_file.read_bytes())
    replayed = [line for step in trace["steps"] for line in step["console"]]

    status, out, _ = _run(["run", str(PROGRAMS / "counter.rtr"),
                           "--events", "0"], capsys)
    assert replayed == out.splitlines()


def test_trace_deterministic_across_runs(tmp_path, capsys):
    files = []
    for i in range(2):
        out_file = tmp_path / f"demo{i}.rtrace.json"
        _run(["trace", str(PROGRAMS / "demo.rtr"), "-o", str(out_file)], capsys)
        files.append(out_file.read_bytes())
    assert files[0] == files[1]


def test_conform_passes(capsys):
    status, out, _ = _run(["conform"], capsys)
    assert status == 0
    assert "17/17 scenarios pass" in out


def test_conform_with_invariants(capsys):
    status, out, _ = _run(["conform", "--check-invariants",
                           "--corpus-size", "25", "--corpus-seed", "3"], capsys)
    assert status == 0
    assert "25/25 corpus items pass" in out


def test_check_clean_program(capsys):
    status, out, _ = _run(["check", str(PROGRAMS / "selfcounter.rtr")], capsys)
    assert status == 0
    assert "FAIL" not in out


def test_check_counter_with_event(capsys):
    status, out, _ = _run(["check", str(PROGRAMS / "counter_plain.rtr"),
                           "--events", "0"], capsys)
    assert status == 0
    assert "similar memories step alike" in out


def test_check_impure_updates_skip_similarity(capsys):
    status, out, _ = _run(["check", str(PROGRAMS / "updater_order.rtr"),
                           "--events", "0"], capsys)
    assert status == 0
    assert "skip  similar transitions" in out


def test_cli_entry_point_subprocess():
    result = subprocess.run(
        [sys.executable, "-m", "minireact.cli", "run",
         str(PROGRAMS / "demo.rtr")],
        capture_output=True, text=True)
    assert result.returncode == 0


def test_serve_subprocess_round_trip(program_src):
    requests = "\n".join([
        json.dumps({"cmd": "load", "program": program_src("demo")}),
        json.dumps({"cmd": "run_until_idle"}),
    ]) + "\n"
    result = subprocess.run(
        [sys.executable, "-m", "minireact.cli", "serve"],
        input=requests, capture_output=True, text=True, timeout=30)
    replies = [json.loads(line) for line in result.stdout.splitlines()]
    assert replies[0]["ok"] and replies[1]["ok"]
    assert replies[1]["mode"] == "EventLoop"
