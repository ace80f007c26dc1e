"""Tests for the command-line interface.

Each test drives main() in-process and captures stdout; exit-code
conventions (0 ok / 1 domain / 2 usage) are part of the interface.
"""

import json

import pytest

from confinv.cli import main

FLAT_4D = """\
dim = 4
signature = 4,0
coords = x1, x2, x3, x4
order = 3
basepoint = 0, 0, 0, 0
g[1][1] = 1
g[2][2] = 1
g[3][3] = 1
g[4][4] = 1
"""

GENERIC_3D = """\
dim = 3
signature = 3,0
coords = x1, x2, x3
order = 4
basepoint = 0, 0, 0
g[1][1] = 8 + x2^2/2 - x3^3/3
g[2][2] = 8 - x1*x3 + x1^4/4
g[3][3] = 8 + x1^2*x2
g[1][2] = x3^2/2 + x1*x2*x3
g[1][3] = 1/4 - x2^3/6
g[2][3] = x1^2/2 + x2^2*x3/5
"""


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_count_single_order(capsys):
    code, out, _ = run_cli(capsys, "count", "--dim", "4", "--order", "4")
    assert code == 0
    assert "hilbert=91" in out


def test_count_table_row(capsys):
    code, out, _ = run_cli(capsys, "count", "--dim", "3", "--max-order", "5", "--table")
    assert code == 0
    row = out.splitlines()[1].split()
    assert row[1:] == ["0", "0", "1", "9", "21"], f"table row was {row}"


def test_count_json_shape(capsys):
    code, out, _ = run_cli(capsys, "count", "--dim", "4", "--order", "2", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["hilbert"] == 3 and data["trdeg"] == 3


def test_count_dimension_too_small_is_domain_error(capsys):
    code, _, err = run_cli(capsys, "count", "--dim", "2", "--order", "3")
    assert code == 1
    assert "DimensionTooSmall" in err


def test_count_requires_an_order_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["count", "--dim", "3"])
    assert exc.value.code == 2


def test_unknown_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["transmogrify"])
    assert exc.value.code == 2


def test_poincare_json(capsys):
    code, out, _ = run_cli(capsys, "poincare", "--dim", "5", "--json")
    assert code == 0
    data = json.loads(out)
    assert set(data) == {"num", "den"}
    assert all(isinstance(c, str) for c in data["num"])


def test_poincare_check_general_flag(capsys):
    code, out, _ = run_cli(capsys, "poincare", "--dim", "3", "--check-general", "--json")
    assert code == 0
    assert json.loads(out)["general_check"] is False


def test_invariants_flat_metric_reports_degeneracy(capsys, tmp_path):
    path = tmp_path / "flat.metric"
    path.write_text(FLAT_4D)
    code, out, _ = run_cli(capsys, "invariants", "--metric", str(path), "--json")
    assert code == 1
    data = json.loads(out)
    assert data["error"] == "DegenerateStructure"


def test_invariants_missing_file_is_domain_error(capsys, tmp_path):
    code, _, err = run_cli(capsys, "invariants", "--metric", str(tmp_path / "nope"))
    assert code == 1


def test_invariants_generic_3d_has_one_order3_invariant(capsys, tmp_path):
    path = tmp_path / "g3.metric"
    path.write_text(GENERIC_3D)
    code, out, _ = run_cli(
        capsys, "invariants", "--metric", str(path), "--max-order", "3", "--json"
    )
    assert code == 0
    data = json.loads(out)
    order3 = [v for v in data["invariants"] if v["order"] == 3]
    assert len(order3) == 1, f"expected exactly one order-3 invariant, got {order3}"
    assert order3[0]["name"] == "cy2"
    assert data["meta"]["dim"] == 3 and data["meta"]["signature"] == [3, 0]
    assert all(r["value"] <= 1e-8 for r in data["residuals"])


def test_invariants_json_is_byte_identical(capsys, tmp_path):
    path = tmp_path / "g3.metric"
    path.write_text(GENERIC_3D)
    args = ("invariants", "--metric", str(path), "--max-order", "3", "--json")
    _, first, _ = run_cli(capsys, *args)
    _, second, _ = run_cli(capsys, *args)
    assert first == second


def test_verify_pass_exit_zero(capsys):
    code, out, _ = run_cli(capsys, "verify", "--suite", "prolong", "--dim", "3")
    assert code == 0
    assert "FAIL" not in out and "passed" in out


def test_verify_failure_exits_one(capsys, monkeypatch):
    monkeypatch.setenv("CI_TOLERANCE", "1e-300")
    code, out, _ = run_cli(
        capsys, "verify", "--suite", "invariance", "--dim", "3", "--order", "3"
    )
    assert code == 1
    assert "FAIL" in out


def test_verify_json_deterministic(capsys):
    args = ("verify", "--suite", "spencer", "--dim", "3", "--order", "2", "--json")
    _, first, _ = run_cli(capsys, *args)
    _, second, _ = run_cli(capsys, *args)
    assert first == second
    data = json.loads(first)
    assert data["failed"] == 0
    assert data["meta"]["seed"] == 0


def test_verify_rejects_unknown_suite(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--suite", "nope"])
    assert exc.value.code == 2


def test_malformed_tolerance_env(capsys, monkeypatch):
    monkeypatch.setenv("CI_TOLERANCE", "many")
    code, _, err = run_cli(capsys, "verify", "--suite", "prolong", "--dim", "3")
    assert code == 1
    assert "CI_TOLERANCE" in err
