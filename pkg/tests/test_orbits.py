"""Tests for the brute-force orbit-dimension oracle."""

import pytest

from confinv import orbits
from confinv.counting import trdeg
from confinv.errors import DegenerateSample
from confinv.exactlinalg import rank
from confinv.jets import Jet, differentiate, monomials
from confinv.orbits import (
    fiber_dim,
    lie_derivative_rows,
    orbit_dim_bruteforce,
    orbit_matrix,
    random_metric_jet,
    scaling_rows,
)


def test_fiber_dim_values():
    assert fiber_dim(3, 2) == 60
    assert fiber_dim(3, 3) == 120
    assert fiber_dim(3, 4) == 210
    assert fiber_dim(4, 2) == 150
    assert fiber_dim(4, 3) == 350


def test_random_metric_jet_reproducible_and_invertible():
    a = random_metric_jet(3, 2, seed=42)
    b = random_metric_jet(3, 2, seed=42)
    for i in range(3):
        for j in range(3):
            assert a[i][j].coeffs == b[i][j].coeffs
            assert a[i][j] is not None
    # Symmetry.
    assert all(a[i][j].coeffs == a[j][i].coeffs for i in range(3) for j in range(3))
    value = [[a[i][j].value() for j in range(3)] for i in range(3)]
    import numpy as np

    assert abs(np.linalg.det(np.array(value, dtype=float))) > 0.5


def test_lie_rows_match_generic_jet_arithmetic():
    """Cross-check the monomial-shift assembly against plain jet products.

    Plain jet multiplication truncates to the minimum order of the
    factors, so the comparison lifts everything to a higher order first
    (the zero-padding beyond order k cannot reach the order-k
    coefficients, because every vector field here vanishes at the
    origin) and truncates at the end.
    """
    n, k = 3, 2
    big = k + 2
    g = random_metric_jet(n, k, seed=7)
    lifted = [[Jet(n, big, g[i][j].coeffs) for j in range(n)] for i in range(n)]
    rows = lie_derivative_rows(g, k)
    mons = list(monomials(n, k))
    r = 0
    for gamma in monomials(n, k + 1):
        if sum(gamma) == 0:
            continue
        for m in range(n):
            x_gamma = Jet(n, big, {gamma: 1})
            expected_vec = []
            for i in range(n):
                for j in range(i, n):
                    term = x_gamma * differentiate(lifted[i][j], m)
                    if gamma[i]:
                        down = tuple(c - (t == i) for t, c in enumerate(gamma))
                        term = term + gamma[i] * (Jet(n, big, {down: 1}) * lifted[m][j])
                    if gamma[j]:
                        down = tuple(c - (t == j) for t, c in enumerate(gamma))
                        term = term + gamma[j] * (Jet(n, big, {down: 1}) * lifted[i][m])
                    term = term.truncate(k)
                    expected_vec.extend(term.coefficient(a) for a in mons)
            assert rows[r] == expected_vec, f"X = x^{gamma} d_{m} row differs"
            r += 1
    assert r == len(rows)


def test_scaling_rows_are_monomial_multiples():
    n, k = 3, 1
    g = random_metric_jet(n, k, seed=3)
    rows = scaling_rows(g, k)
    mons = list(monomials(n, k))
    # phi = 1 reproduces g itself.
    first = rows[0]
    expected = []
    for i in range(n):
        for j in range(i, n):
            expected.extend(g[i][j].coefficient(a) for a in mons)
    assert first == expected
    assert len(rows) == len(mons)


ORACLE = {
    (3, 2): 60,
    (3, 3): 119,
    (3, 4): 200,
    (4, 2): 147,
    (4, 3): 311,
}


@pytest.mark.parametrize("n,k", sorted(ORACLE))
def test_orbit_rank_oracle(n, k):
    expected = ORACLE[(n, k)]
    r = orbit_dim_bruteforce(n, k, seed=0)
    assert r == expected, f"({n},{k}): rank {r} != {expected}"
    assert fiber_dim(n, k) - r == trdeg(n, k)


def test_orbit_rank_stable_across_seeds():
    for seed in (1, 2):
        assert orbit_dim_bruteforce(3, 3, seed) == 119


def test_flat_metric_is_degenerate(monkeypatch):
    """The constant flat jet has a huge stabilizer; the sampler must reject it."""
    n, k = 3, 3
    flat = [
        [Jet(n, k, {(0,) * n: 1} if i == j else {}) for j in range(n)]
        for i in range(n)
    ]
    deficit = fiber_dim(n, k) - rank(orbit_matrix(flat, k))
    assert deficit > trdeg(n, k)
    monkeypatch.setattr(orbits, "random_metric_jet", lambda *a, **kw: flat)
    with pytest.raises(DegenerateSample):
        orbit_dim_bruteforce(n, k, seed=0)
