"""Named verification suites with deterministic, seeded cases.

Each suite reruns one of the package's cross-checks (symbol-operator
kernels, prolongations, generating-function consistency, the
brute-force orbit oracle, invariance of the exported scalars, and
functional independence) and reports per-case pass/fail entries.  All
randomness flows from the seed argument, so a suite's output is a pure
function of (dim, order, seed, tolerance).
"""

from __future__ import annotations

import os
import warnings
from fractions import Fraction as QQ

import numpy as np

from .counting import hilbert, poincare, poincare_general_check, trdeg
from .errors import ConfinvError
from .invariants import float_invariants, invariance_residuals, jacobian_rank
from .jets import EXACT, Jet, exp_jet, monomials
from .orbits import fiber_dim, orbit_dim_bruteforce
from .spencer import (
    conformal_basis,
    iota_check,
    prolong,
    random_invertible_symmetric,
    zeta,
)
from .tensors import DiffeoJet, MetricJet

SUITES = ("spencer", "prolong", "poincare", "orbit", "invariance", "independence")

DEFAULT_TOLERANCE = 1e-9


def tolerance_from_env() -> float:
    """Float tolerance for verification, overridable via CI_TOLERANCE."""
    raw = os.environ.get("CI_TOLERANCE", "")
    if not raw:
        return DEFAULT_TOLERANCE
    try:
        value = float(raw)
    except ValueError:
        raise ConfinvError(f"CI_TOLERANCE must be a float, got {raw!r}") from None
    if value <= 0:
        raise ConfinvError("CI_TOLERANCE must be positive")
    return value


def _case(name: str, expected, actual, ok: bool) -> dict:
    return {"case": name, "expected": expected, "actual": actual, "pass": bool(ok)}


# ---------------------------------------------------------------------------
# Seeded exact samples (the verify counterpart of the test fixtures)
# ---------------------------------------------------------------------------


def random_exact_metric(n: int, k: int, seed: int) -> MetricJet:
    """Sparse random polynomial metric, diagonally dominant, exact backend."""
    rng = np.random.default_rng(seed)
    monos = [m for m in monomials(n, k) if sum(m) >= 1]
    comps = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            coeffs = {}
            for _ in range(3):
                alpha = monos[rng.integers(len(monos))]
                num = int(rng.integers(-3, 4))
                if num:
                    coeffs[alpha] = coeffs.get(alpha, QQ(0)) + QQ(num, 2)
            const = QQ(2 * n + 2) if i == j else QQ(int(rng.integers(-2, 3)), 4)
            if const:
                coeffs[(0,) * n] = coeffs.get((0,) * n, QQ(0)) + const
            comps[i][j] = comps[j][i] = Jet(n, k, coeffs, EXACT)
    return MetricJet.from_components(comps)


def random_exact_diffeo(n: int, k: int, seed: int) -> DiffeoJet:
    rng = np.random.default_rng(seed)
    monos = [m for m in monomials(n, k) if sum(m) >= 1]
    comps = []
    for i in range(n):
        coeffs = {}
        for _ in range(4):
            alpha = monos[rng.integers(len(monos))]
            num = int(rng.integers(-2, 3))
            if num:
                coeffs[alpha] = coeffs.get(alpha, QQ(0)) + QQ(num, 2)
        unit = tuple(1 if t == i else 0 for t in range(n))
        coeffs[unit] = coeffs.get(unit, QQ(0)) + 4
        comps.append(Jet(n, k, coeffs, EXACT))
    return DiffeoJet(comps)


def random_exact_conformal(n: int, k: int, seed: int) -> Jet:
    """exp of a random polynomial with zero constant term: exact, positive."""
    rng = np.random.default_rng(seed)
    monos = [m for m in monomials(n, k) if sum(m) >= 1]
    coeffs = {}
    for _ in range(4):
        alpha = monos[rng.integers(len(monos))]
        num = int(rng.integers(-2, 3))
        if num:
            coeffs[alpha] = coeffs.get(alpha, QQ(0)) + QQ(num, 3)
    return exp_jet(Jet(n, k, coeffs, EXACT))


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------


def suite_spencer(dim: int, order: int, seed: int, tolerance: float) -> list:
    """Kernel dimensions of the symbol operators: n at level 1, then 0."""
    cases = []
    for k in range(1, max(order, 1) + 1):
        for offset in range(3):
            g = random_invertible_symmetric(dim, seed + offset)
            _, kernel = zeta(dim, k, g)
            expected = dim if k == 1 else 0
            cases.append(
                _case(
                    f"zeta_kernel_k{k}_seed{seed + offset}",
                    expected,
                    kernel,
                    kernel == expected,
                )
            )
    return cases


def suite_prolong(dim: int, order: int, seed: int, tolerance: float) -> list:
    g = random_invertible_symmetric(dim, seed)
    co = conformal_basis(dim, g)
    first = prolong(co, 1)
    second = prolong(co, 2)
    iota_ok = iota_check(dim, g)
    co_dim = dim * (dim - 1) // 2 + 1
    return [
        _case("conformal_algebra_dim", co_dim, len(co), len(co) == co_dim),
        _case("first_prolongation_dim", dim, len(first), len(first) == dim),
        _case("second_prolongation_dim", 0, len(second), len(second) == 0),
        _case("iota_injective", True, iota_ok, iota_ok),
    ]


def suite_poincare(dim: int, order: int, seed: int, tolerance: float) -> list:
    p = poincare(dim)
    terms = 2 * dim + 7
    series = p.series(terms)
    wanted = [QQ(hilbert(dim, k)) for k in range(terms)]
    match = series == wanted
    cases = [
        _case(f"series_matches_hilbert_first_{terms}", True, match, match)
    ]
    # n = 3 is listed separately for a reason: the general closed form
    # disagrees with it, and that disagreement is part of the record.
    expected_general = dim != 3
    got = poincare_general_check(dim)
    cases.append(
        _case("general_form_agreement", expected_general, got, got == expected_general)
    )
    return cases


def suite_orbit(dim: int, order: int, seed: int, tolerance: float) -> list:
    fiber = fiber_dim(dim, order)
    expected = fiber - trdeg(dim, order)
    rank = orbit_dim_bruteforce(dim, order, seed)
    return [
        _case(
            f"orbit_rank_n{dim}_k{order}_seed{seed}",
            expected,
            rank,
            rank == expected,
        )
    ]


def suite_invariance(dim: int, order: int, seed: int, tolerance: float) -> list:
    g = random_exact_metric(dim, order, seed)
    phi = random_exact_diffeo(dim, order + 1, seed + 1)
    conf = random_exact_conformal(dim, order, seed + 2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        residuals = invariance_residuals(g, phi, conf)
    worst = max(residuals.values()) if residuals else float("inf")
    worst_name = max(residuals, key=residuals.get) if residuals else "none"
    return [
        _case("exported_invariants_nonempty", True, len(residuals) > 0, len(residuals) > 0),
        _case(
            f"worst_relative_residual({worst_name})",
            f"<= {tolerance:g}",
            worst,
            worst <= tolerance,
        ),
    ]


def suite_independence(dim: int, order: int, seed: int, tolerance: float) -> list:
    expected = trdeg(dim, order)
    params = (dim * (dim + 1) // 2) * len(list(monomials(dim, order)))
    directions = min(params, 2 * expected + 2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rank = jacobian_rank(
            [lambda g: float_invariants(g, order)],
            n=dim,
            k=order,
            seed=seed,
            trials=3,
            directions=directions,
        )
    return [
        _case(
            f"jacobian_rank_n{dim}_k{order}",
            expected,
            rank,
            rank == expected,
        )
    ]


_SUITE_FUNCTIONS = {
    "spencer": suite_spencer,
    "prolong": suite_prolong,
    "poincare": suite_poincare,
    "orbit": suite_orbit,
    "invariance": suite_invariance,
    "independence": suite_independence,
}


def run_suite(
    name: str, dim: int, order: int, seed: int = 0, tolerance: float | None = None
) -> dict:
    """Run one named suite; returns the report dict used by the CLI."""
    if name not in _SUITE_FUNCTIONS:
        raise ConfinvError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    tol = tolerance_from_env() if tolerance is None else tolerance
    cases = _SUITE_FUNCTIONS[name](dim, order, seed, tol)
    failed = sum(1 for c in cases if not c["pass"])
    return {
        "suite": name,
        "meta": {"dim": dim, "order": order, "seed": seed, "tolerance": tol},
        "cases": cases,
        "passed": len(cases) - failed,
        "failed": failed,
    }
