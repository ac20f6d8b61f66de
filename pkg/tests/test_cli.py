"""Command-line behavior: exit codes, report files, dumps, vectors."""
import json
from pathlib import Path

import pytest

from mitto.cli import main

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"
GOLDEN = str(SCENARIO_DIR / "golden_fungible_roundtrip.json")


def write_scenario(tmp_path, obj, name="s.json") -> str:
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def test_run_golden_exit_zero(capsys):
    assert main(["run", GOLDEN, "--json-report", "/dev/null"]) == 0
    out = capsys.readouterr().out
    assert "golden_fungible_roundtrip" in out
    assert "ok" in out


def test_run_prints_report_to_stdout_by_default(capsys):
    assert main(["run", GOLDEN]) == 0
    out = capsys.readouterr().out
    body, summary = out.rsplit("\n", 2)[0], out.rsplit("\n", 2)[1]
    report = json.loads(body)
    assert report["ok"] is True
    assert "0 violations" in summary


def test_run_json_report_written(tmp_path):
    target = tmp_path / "report.json"
    assert main(["run", GOLDEN, "--json-report", str(target)]) == 0
    report = json.loads(target.read_text())
    assert report["scenario"] == "golden_fungible_roundtrip"
    assert report["ok"] is True


def test_run_dump_written(tmp_path):
    dump_dir = tmp_path / "dumps"
    assert main(["run", GOLDEN, "--dump", str(dump_dir), "--json-report", "/dev/null"]) == 0
    state = json.loads((dump_dir / "golden_fungible_roundtrip.state.json").read_text())
    assert set(state) == {"mainchain", "chains"}


def test_run_expectation_failure_exit_one(tmp_path, capsys):
    path = write_scenario(tmp_path, {
        "name": "fails",
        "seed": 2,
        "chains": [
            {"label": "alpha", "epoch_length": 2,
             "issuances": [{"name": "T", "fungible": True, "amount": 5, "owner": "a"}]},
            {"label": "beta", "epoch_length": 2},
        ],
        "steps": [
            {"op": "send", "from": "alpha", "to": "beta", "name": "T", "amount": 5,
             "owner": "a", "receiver": "b", "expect": {"accepted": False}},
        ],
    })
    assert main(["run", path, "--json-report", "/dev/null"]) == 1
    assert "FAILED" in capsys.readouterr().out


def test_run_parse_error_exit_two(tmp_path, capsys):
    path = write_scenario(tmp_path, {"name": "x"})
    assert main(["run", path]) == 2
    assert "parse error" in capsys.readouterr().err


def test_run_missing_file_exit_two(tmp_path, capsys):
    assert main(["run", str(tmp_path / "absent.json")]) == 2
    assert "parse error" in capsys.readouterr().err


def test_run_scenario_error_exit_two(tmp_path, capsys):
    path = write_scenario(tmp_path, {
        "name": "runtime",
        "seed": 2,
        "chains": [{"label": "alpha", "epoch_length": 2}, {"label": "beta", "epoch_length": 2}],
        "steps": [
            {"op": "send", "from": "alpha", "to": "beta", "name": "NOPE", "amount": 1,
             "owner": "a", "receiver": "b"},
        ],
    })
    assert main(["run", path]) == 2
    assert "scenario error" in capsys.readouterr().err


def test_validate_exit_codes(tmp_path, capsys):
    assert main(["validate", GOLDEN]) == 0
    assert "ok:" in capsys.readouterr().out
    bad = write_scenario(tmp_path, {"name": "x", "seed": 1, "chains": [], "steps": []})
    assert main(["validate", bad]) == 2


def test_fuzz_mode(capsys):
    assert main(["run", GOLDEN, "--fuzz", "3", "--seed", "11", "--json-report", "/dev/null"]) == 0
    out = capsys.readouterr().out
    assert "3 traces" in out
    assert "routing 3/3 rejected" in out


def test_fuzz_count_must_be_positive(capsys):
    assert main(["run", GOLDEN, "--fuzz", "0"]) == 2
    assert "positive" in capsys.readouterr().err


def test_vectors_emit_then_check(tmp_path, capsys):
    assert main(["vectors", str(tmp_path)]) == 0
    assert "emitted" in capsys.readouterr().out
    assert main(["vectors", str(tmp_path)]) == 0
    assert "reproduced" in capsys.readouterr().out


def test_vectors_mismatch_exit_one(tmp_path, capsys):
    assert main(["vectors", str(tmp_path)]) == 0
    capsys.readouterr()
    target = tmp_path / "vectors.json"
    data = json.loads(target.read_text())
    data["cases"][0]["expect"]["accepted"] = not data["cases"][0]["expect"]["accepted"]
    target.write_text(json.dumps(data))
    assert main(["vectors", str(tmp_path)]) == 1
    captured = capsys.readouterr()
    assert "mismatches" in captured.out
    assert data["cases"][0]["id"] in captured.err


def test_vectors_unreadable_file_exit_two(tmp_path, capsys):
    (tmp_path / "vectors.json").write_text("{not json")
    assert main(["vectors", str(tmp_path)]) == 2
    assert "cannot check" in capsys.readouterr().err


def test_usage_error_exit_two():
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 2
