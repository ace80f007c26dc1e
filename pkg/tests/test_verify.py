"""Tests for the verification suites behind the CLI."""

import pytest

from confinv.errors import ConfinvError
from confinv.verify import (
    SUITES,
    run_suite,
    tolerance_from_env,
)


def test_unknown_suite_rejected():
    with pytest.raises(ConfinvError):
        run_suite("nope", 3, 3)


def test_tolerance_env_default(monkeypatch):
    monkeypatch.delenv("CI_TOLERANCE", raising=False)
    assert tolerance_from_env() == 1e-9


def test_tolerance_env_override(monkeypatch):
    monkeypatch.setenv("CI_TOLERANCE", "1e-6")
    assert tolerance_from_env() == 1e-6


def test_tolerance_env_malformed(monkeypatch):
    monkeypatch.setenv("CI_TOLERANCE", "soon")
    with pytest.raises(ConfinvError):
        tolerance_from_env()
    monkeypatch.setenv("CI_TOLERANCE", "-1")
    with pytest.raises(ConfinvError):
        tolerance_from_env()


def test_spencer_suite_passes():
    report = run_suite("spencer", 3, 2, seed=0)
    assert report["failed"] == 0
    names = [c["case"] for c in report["cases"]]
    assert "zeta_kernel_k1_seed0" in names
    k1 = [c for c in report["cases"] if c["case"].startswith("zeta_kernel_k1")]
    assert all(c["actual"] == 3 for c in k1), "level-1 kernel must equal dim"


def test_prolong_suite_passes():
    for n in (3, 4):
        report = run_suite("prolong", n, 2, seed=1)
        assert report["failed"] == 0, report["cases"]


def test_poincare_suite_records_general_form_disagreement():
    report = run_suite("poincare", 3, 0)
    case = {c["case"]: c for c in report["cases"]}["general_form_agreement"]
    assert case["actual"] is False and case["pass"], (
        "the closed-form disagreement in dimension 3 is expected, so it passes"
    )
    report4 = run_suite("poincare", 4, 0)
    case4 = {c["case"]: c for c in report4["cases"]}["general_form_agreement"]
    assert case4["actual"] is True and case4["pass"]


def test_orbit_suite_matches_paper_rank():
    report = run_suite("orbit", 3, 3, seed=7)
    assert report["failed"] == 0
    assert report["cases"][0]["actual"] == 119


def test_invariance_suite_passes_for_3d(monkeypatch):
    monkeypatch.delenv("CI_TOLERANCE", raising=False)
    report = run_suite("invariance", 3, 4, seed=0)
    assert report["failed"] == 0, report["cases"]
    assert report["meta"]["tolerance"] == 1e-9


def test_invariance_suite_honors_tolerance():
    strict = run_suite("invariance", 3, 4, seed=0, tolerance=1e-300)
    assert strict["failed"] >= 1, "an impossible tolerance must fail the residual case"


def test_independence_suite_small_case():
    report = run_suite("independence", 3, 3, seed=0)
    assert report["failed"] == 0
    assert report["cases"][0]["expected"] == 1


def test_reports_are_deterministic():
    a = run_suite("invariance", 3, 3, seed=11)
    b = run_suite("invariance", 3, 3, seed=11)
    assert a == b


def test_all_suites_are_runnable():
    assert set(SUITES) == {
        "spencer",
        "prolong",
        "poincare",
        "orbit",
        "invariance",
        "independence",
    }
