"""Command line interface: each subcommand produces its artifact."""

import json

import pytest

from myohold import CalibrationProfile, ScenarioRecord
from myohold.cli import build_parser, main


def test_parser_knows_all_subcommands():
    parser = build_parser()
    args = parser.parse_args(["simulate", "input1"])
    assert args.command == "simulate"
    for command in ("simulate", "evaluate", "calibrate", "serve"):
        assert command in parser.format_help()


def test_simulate_writes_record_and_summary(tmp_path, capsys):
    out = tmp_path / "run.csv"
    summary = tmp_path / "run.json"
    code = main([
        "simulate", "input1", "-o", str(out), "--summary", str(summary),
    ])
    assert code == 0
    record = ScenarioRecord.from_csv(out)
    assert len(record) == 6001
    data = json.loads(summary.read_text())
    assert data["scenario"] == "input1"
    assert "wrote 6001 rows" in capsys.readouterr().out


def test_evaluate_prints_summary_json(capsys):
    code = main(["evaluate", "input2"])
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    assert data["scenario"] == "input2"
    assert data["rows"] == 6001


def test_evaluate_rejects_unknown_scenario():
    with pytest.raises(SystemExit):
        main(["evaluate", "no_such_scenario"])


def test_calibrate_writes_profile(tmp_path, capsys):
    out = tmp_path / "calib.json"
    trace = tmp_path / "trace.csv"
    code = main([
        "calibrate", "-o", str(out), "--save-trace", str(trace), "--noise", "0.01",
    ])
    assert code == 0
    profile = CalibrationProfile.load(out)
    assert profile.channels == 2
    assert trace.exists()


def test_calibrate_from_recorded_trace(tmp_path):
    trace = tmp_path / "trace.csv"
    main(["calibrate", "-o", str(tmp_path / "first.json"), "--save-trace", str(trace)])
    out = tmp_path / "second.json"
    code = main(["calibrate", "-o", str(out), "--trace", str(trace)])
    assert code == 0
    assert CalibrationProfile.load(out).channels == 2


def test_simulate_accepts_trace_path(tmp_path):
    trace = tmp_path / "trace.csv"
    main(["calibrate", "-o", str(tmp_path / "c.json"), "--save-trace", str(trace)])
    out = tmp_path / "run.csv"
    code = main(["simulate", str(trace), "-o", str(out), "--tick", "0.01"])
    assert code == 0
    assert len(ScenarioRecord.from_csv(out)) > 100
