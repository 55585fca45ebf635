import json
import subprocess
import sys
from importlib import resources

import pytest

from artin_approx.cli import COMMANDS, main, run
from artin_approx.textform import series_from_json, series_to_json

FIXTURES = resources.files("artin_approx") / "fixtures"
NAMES = ["catalan", "node", "split_node", "divide"]


def fixture(name):
    return str(FIXTURES / f"{name}.json")


def write(tmp_path, doc, name="doc.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc) if not isinstance(doc, str) else doc, encoding="utf-8")
    return str(path)


def series_records(obj):
    if isinstance(obj, dict):
        if {"nvars", "prec", "terms"} <= set(obj):
            yield obj
        else:
            for v in obj.values():
                yield from series_records(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from series_records(v)


def catalan_coeffs(report):
    (y,) = report["outputs"]["y"]
    s = series_from_json(y)
    return [s.coeff((k,)) for k in range(1, 8)]


def test_solve_catalan():
    code, text, err = run(["solve", fixture("catalan")])
    assert code == 0 and err is None
    report = json.loads(text)
    assert catalan_coeffs(report) == [1, 1, 2, 5, 14, 42, 132]
    assert report["outputs"]["verify"]["passed"]


def test_divide_example():
    code, text, _ = run(["divide", fixture("divide")])
    assert code == 0
    out = json.loads(text)["outputs"]
    q = series_from_json(out["q"])
    r = series_from_json(out["r"]["series"])
    assert dict(q.terms) == {(0, 1): 1}
    assert dict(r.terms) == {(1, 1): -1}


@pytest.mark.parametrize("name", NAMES)
def test_round_trip_of_emitted_series(name):
    seen = 0
    for command in COMMANDS:
        code, text, _ = run([command, fixture(name)])
        if text is None:
            continue
        for rec in series_records(json.loads(text)):
            canonical = {k: rec[k] for k in ("nvars", "prec", "terms")}
            assert series_to_json(series_from_json(rec)) == canonical
            seen += 1
    assert seen > 0


@pytest.mark.parametrize("name", NAMES)
def test_reports_are_deterministic(name):
    for command in COMMANDS:
        assert run([command, fixture(name)]) == run([command, fixture(name)])


def test_malformed_document_exits_one_without_output(tmp_path, capsys):
    path = write(tmp_path, "{not json")
    assert main(["solve", path]) == 1
    out = capsys.readouterr()
    assert out.out == "" and "error" in out.err
    bad_ring = write(tmp_path, {"schema": "weierstrass-artin/v1", "ring": {"x": ["x", "x"]},
                                "order": 4, "system": ["x"]}, "ring.json")
    assert run(["solve", bad_ring])[:2] == (1, None)
    unknown = write(tmp_path, {"schema": "weierstrass-artin/v1", "ring": {"x": ["x"], "y": ["y"]},
                               "order": 4, "system": ["y - z"]}, "unknown.json")
    assert run(["solve", unknown])[:2] == (1, None)


def test_usage_errors_exit_one():
    assert run(["frobnicate", fixture("catalan")])[0] == 1
    assert run(["solve", fixture("catalan"), "--order", "0"])[0] == 1


def test_precondition_failure_exits_two(tmp_path):
    doc = json.loads(open(fixture("node")).read())
    doc["candidate"] = ["0"]
    code, text, _ = run(["check-approx", write(tmp_path, doc)])
    assert code == 2
    assert json.loads(text)["status"] == "precondition-failed"


def test_precision_shortfall_exits_three():
    code, text, _ = run(["solve", fixture("split_node"), "--order", "12", "--strict-precision"])
    assert code == 3
    report = json.loads(text)
    assert report["status"] == "precision-shortfall"
    assert report["error"]["required"] is not None


def test_out_flag_writes_file(tmp_path):
    target = tmp_path / "report.json"
    code, text, _ = run(["solve", fixture("catalan"), "--out", str(target)])
    assert code == 0 and text is None
    assert catalan_coeffs(json.loads(target.read_text())) == [1, 1, 2, 5, 14, 42, 132]


def test_timestamp_is_opt_in():
    _, text, _ = run(["solve", fixture("catalan")])
    assert "generated_at" not in json.loads(text)
    _, text, _ = run(["solve", fixture("catalan"), "--timestamp"])
    assert "generated_at" in json.loads(text)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "artin_approx", "divide", fixture("divide")],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["status"] == "ok"
