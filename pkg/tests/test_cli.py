import io
import json

import pytest

from arcbound.cli import run


def call(argv):
    buf = io.StringIO()
    code = run(argv, out=buf)
    text = buf.getvalue()
    return code, (json.loads(text) if text else None), text


def test_verify_headline():
    code, doc, _ = call(["verify-minor-arcs", "--n", "39", "--delta", "993/7000",
                         "--eps-prime", "1/10000", "--engine", "both"])
    assert code == 0
    assert doc["schema"] == "1" and doc["tool"] == "arcbound"
    assert doc["params"]["delta"] == "993/7000"
    rep = doc["reports"][0]
    assert rep["margin"] == "-37/20000"
    assert rep["argmax"] == {"phi": "3/2", "tau": "-9/4", "phi3": "0", "phi4": "0"}
    assert "certificate" in rep


def test_verify_n38_exit_1():
    code, doc, _ = call(["verify-minor-arcs", "--n", "38"])
    assert code == 1 and doc["all_passed"] is False


def test_verify_sampling_and_range():
    code, doc, _ = call(["verify-minor-arcs", "--n", "40", "--n-max", "41", "--samples", "50"])
    assert code == 0
    assert [r["n"] for r in doc["reports"]] == [40, 41]
    assert all(r["sampling"]["within_optimum"] for r in doc["reports"])


@pytest.mark.parametrize("argv", [
    ["verify-minor-arcs", "--n", "39", "--delta", "0.14"],
    ["verify-minor-arcs", "--n", "39", "--bogus"],
    ["verify-minor-arcs", "--n", "39", "--delta", "1/7"],
    ["verify-minor-arcs", "--n", "41", "--n-max", "40"],
    ["snf", "--input", "/nonexistent.json"],
    [],
])
def test_usage_errors_exit_2(argv):
    assert call(argv)[0] == 2


def test_engine_disagreement_exit_3(monkeypatch):
    from arcbound import minmax
    from arcbound.minmax import MinMaxResult
    real = minmax._vertex

    def skewed(*args):
        r = real(*args)
        return MinMaxResult(r.value - 1, r.argmax, r.cell, r.min_index, "vertex", r.n_cells)

    monkeypatch.setattr(minmax, "_vertex", skewed)
    assert call(["verify-minor-arcs", "--n", "39", "--engine", "both"])[0] == 3


def test_lab_commands(tmp_path):
    ident = tmp_path / "id.json"
    ident.write_text(json.dumps([[1, 0], [0, 1]]))
    code, doc, _ = call(["nullcount", "--input", str(ident), "--q", "12", "--method", "both"])
    assert code == 0 and doc["null_count"] == 1 and doc["counts"] == {"smith": 1, "brute": 1}
    code, doc, _ = call(["snf", "--input", str(ident)])
    assert doc["invariants"] == [1, 1]

    pair = tmp_path / "pair.json"
    pair.write_text(json.dumps({"F": {"matrix": [[1]], "linear": [0]}, "G": {"matrix": [[0]]},
                                "q": 5, "a": [1, 0], "m": [0]}))
    code, doc, _ = call(["expsum", "pointwise", "--input", str(pair)])
    assert code == 0 and abs(float(doc["abs"]) - 5 ** 0.5) < 1e-9
    code, doc, _ = call(["expsum", "averaged", "--input", str(pair), "--q", "3"])
    assert code == 0
    code, doc, _ = call(["poisson-check", "--input", str(pair), "--q", "2", "--big-p", "10",
                         "--m-cut", "40", "--z", "1/50,0"])
    assert code == 0 and float(doc["abs_diff"]) < 1e-6
    code, doc, _ = call(["singular-series", "--input", str(pair), "--r-max", "6"])
    assert doc["terms"][0] == {"q": 1, "A": "1"}
    code, doc, _ = call(["singular-integral", "--input", str(pair), "--r", "1/2", "--grid", "50"])
    assert code == 0 and float(doc["value"]) > 0


def test_bad_input_json(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert call(["snf", "--input", str(bad)])[0] == 2
    missing = tmp_path / "missing.json"
    missing.write_text(json.dumps({"F": {"matrix": [[1]]}}))
    assert call(["singular-series", "--input", str(missing), "--r-max", "3"])[0] == 2


def test_output_is_deterministic():
    argv = ["verify-minor-arcs", "--n", "42", "--samples", "100", "--seed", "9"]
    assert call(argv)[2] == call(argv)[2]
