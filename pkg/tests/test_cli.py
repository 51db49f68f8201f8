import csv
import io
import json
from fractions import Fraction

import pytest

from shapebern.bernstein import poly_from_json
from shapebern.certify import Certificate, ShapeQuery, certify_shape
from shapebern.cli import main
from shapebern.exact import parse_rational
from shapebern.operators import FLOOR_INT, apply, sqrt_function

GRID = {"n": 6, "values": ["0", "50/60", "56/60", "57/60", "58/60", "59/60", "1"]}


@pytest.fixture
def grid_file(tmp_path):
    p = tmp_path / "counterexample6.json"
    p.write_text(json.dumps(GRID), encoding="utf-8")
    return p


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_approx_counterexample(capsys, grid_file):
    code, out, _ = run(capsys, "approx", "--f", f"@{grid_file}", "--n", 6, "--op", "floor")
    assert code == 0
    assert json.loads(out)["int_coeffs"] == [0, 5, 14, 19, 14, 5, 1]


def test_approx_then_certify_roundtrip(capsys, tmp_path, grid_file):
    poly = tmp_path / "p.json"
    assert main(["approx", "--f", f"@{grid_file}", "--n", "6", "--out", str(poly)]) == 0
    code, out, _ = run(capsys, "certify", "--poly", poly, "--query", "monotone-increasing")
    assert code == 0
    cert = Certificate.from_json(json.loads(out))
    lib = certify_shape(poly_from_json(poly.read_text()), ShapeQuery.MONOTONE_INCREASING)
    assert cert == lib and cert.refuted
    assert run(capsys, "certify", "--poly", poly, "--query", "monotone-increasing", "--expect", "refuted")[0] == 0
    assert run(capsys, "certify", "--poly", poly, "--query", "monotone-increasing", "--expect", "certified")[0] == 1


def test_certify_matches_library_for_sqrt(capsys, tmp_path):
    poly = tmp_path / "s.json"
    main(["approx", "--f", "sqrt", "--n", "10", "--out", str(poly)])
    code, out, _ = run(capsys, "certify", "--poly", poly, "--query", "concave")
    lib = certify_shape(apply(sqrt_function(), 10, FLOOR_INT), ShapeQuery.CONCAVE)
    assert Certificate.from_json(json.loads(out)) == lib


def test_approx_linear_power_basis(capsys):
    code, out, _ = run(capsys, "approx", "--f", "linear:1,0", "--n", 7, "--op", "floor", "--basis", "power")
    obj = json.loads(out)
    assert code == 0 and obj["basis"] == "power" and obj["coeffs"] == ["0", "1"]


def test_hypothesis_command(capsys, grid_file):
    code, out, _ = run(capsys, "hypothesis", "--samples", grid_file, "--id", "PropPhiInc")
    assert code == 1 and json.loads(out) == {"hypothesis": "PropPhiInc", "holds": False, "first_violation": 2}
    code, out, _ = run(capsys, "hypothesis", "--samples", grid_file, "--id", "Thm1m_b")
    assert code == 1


def test_corrections_with_quadrature(capsys):
    code, out, _ = run(capsys, "corrections", "--kind", "phi-convex-n", "--n", 5, "--check-quadrature", "--tol", "1e-9")
    obj = json.loads(out)
    assert code == 0 and obj["quadrature_check"]["passed"]
    assert parse_rational(obj["entries"]["0"]) == Fraction(17, 10)


def test_envelope_csv_parses_back(capsys):
    code, out, _ = run(capsys, "envelope", "--kind", "epsilon-convex", "--n", 8, "--grid", 10)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 11
    from shapebern.corrections import envelope
    for r in rows:
        assert parse_rational(r["value"]) == envelope("epsilon-convex", 8, parse_rational(r["x"]))


def test_search_exit_codes(capsys):
    code, out, _ = run(capsys, "search", "--n", 6, "--budget", 500, "--seed", 1)
    assert code == 0 and json.loads(out)["found"]
    code, out, _ = run(capsys, "search", "--n", 2, "--budget", 50, "--seed", 1)
    assert code == 1 and not json.loads(out)["found"]


def test_verify_paper_with_figures(capsys, tmp_path):
    code, out, _ = run(capsys, "verify-paper", "--figures-dir", tmp_path / "figs")
    assert code == 0 and json.loads(out)["passed"]
    for name in ("figure1_power_shifted.csv", "figure2_sqrt.csv"):
        rows = list(csv.DictReader((tmp_path / "figs" / name).open()))
        assert len(rows) == 201
        assert [parse_rational(rows[200][c]) for c in ("floor_B5", "floor_B10")] == [
            parse_rational(rows[200]["f"])] * 2


def test_convergence_csv(capsys):
    code, out, _ = run(capsys, "convergence", "--f", "sqrt", "--ns", "10,100", "--ops", "floor")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and float(rows[1]["sup_deviation"]) < float(rows[0]["sup_deviation"])


@pytest.mark.parametrize(
    "argv",
    [[], ["approx", "--n", "3"], ["approx", "--f", "cos", "--n", "3"], ["search", "--n", "0"],
     ["certify", "--poly", "/nonexistent.json", "--query", "convex"],
     ["corrections", "--kind", "phi-inc", "--n", "2"], ["envelope", "--kind", "bogus", "--n", "6"],
     ["approx", "--f", "linear:1,1/2", "--n", "3", "--op", "floor"]],
)
def test_usage_errors_exit_2(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 2
