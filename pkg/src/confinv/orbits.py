"""Brute-force orbit dimensions in metric-jet fibers.

The group of origin-preserving diffeomorphism jets, extended by jets of
conformal rescalings, acts on the fiber of k-jets of metrics.  The
codimension of a generic orbit is the number of independent scalar
invariants of order up to k, so computing one orbit rank from scratch
independently checks the counting results.

The orbit tangent space at a metric jet g is spanned by

    L_X g   for X = x^gamma d_m,  1 <= |gamma| <= k+1,
    phi * g for phi = x^gamma,    0 <= |gamma| <= k.

Vector fields vanishing at the origin are enough (and necessary: for X
with X(0) != 0 the k-jet of L_X g needs the (k+1)-jet of g, which the
fiber does not carry; such X move the basepoint, which the invariant
count quotients out anyway).  With |gamma| >= 1 every term of

    (L_X g)_ij = X^m d_m g_ij + g_mj d_i X^m + g_im d_j X^m

is a monomial shift of a derivative of g, so the whole assembly is exact
integer arithmetic on jet coefficients, and the span's rank is computed
by fraction-free elimination.  No floating point enters at any step.
"""

from __future__ import annotations

import random

from .counting import trdeg
from .errors import DegenerateSample
from .exactlinalg import rank
from .jets import Jet, differentiate, monomial_count, monomial_shift, monomials


def fiber_dim(n: int, k: int) -> int:
    """Dimension of the k-jet fiber of metrics: components times monomials."""
    return (n * (n + 1) // 2) * monomial_count(n, k)


def random_metric_jet(n: int, k: int, seed: int) -> list[list[Jet]]:
    """Random exact metric jet: integer coefficients, invertible value.

    Returned as a full symmetric n x n array of Jets of order k with
    entries in [-5, 5].  Retries the constant term until it is invertible
    (as an integer matrix determinant check).
    """
    rng = random.Random(seed)
    mons = list(monomials(n, k))

    def _det(m):
        size = len(m)
        if size == 1:
            return m[0][0]
        total = 0
        for c in range(size):
            minor = [row[:c] + row[c + 1 :] for row in m[1:]]
            total += (-1) ** c * m[0][c] * _det(minor)
        return total

    while True:
        value = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                value[i][j] = value[j][i] = rng.randint(-5, 5)
        if _det(value) != 0:
            break
    g = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            coeffs = {}
            for alpha in mons:
                c = value[i][j] if sum(alpha) == 0 else rng.randint(-5, 5)
                if c:
                    coeffs[alpha] = c
            jet = Jet(n, k, coeffs)
            g[i][j] = g[j][i] = jet
    return g


def lie_derivative_rows(g, k: int):
    """Coefficient rows of L_X g over X = x^gamma d_m, 1<=|gamma|<=k+1."""
    n = len(g)
    dg = [[[differentiate(g[i][j], m) for m in range(n)] for j in range(n)] for i in range(n)]
    rows = []
    for gamma in monomials(n, k + 1):
        if sum(gamma) == 0:
            continue
        for m in range(n):
            lie = [[None] * n for _ in range(n)]
            for i in range(n):
                for j in range(i, n):
                    term = monomial_shift(dg[i][j][m], gamma, order=k)
                    if gamma[i]:
                        shifted = monomial_shift(
                            g[m][j], tuple(c - (t == i) for t, c in enumerate(gamma)), order=k
                        )
                        term = term + gamma[i] * shifted
                    if gamma[j]:
                        shifted = monomial_shift(
                            g[i][m], tuple(c - (t == j) for t, c in enumerate(gamma)), order=k
                        )
                        term = term + gamma[j] * shifted
                    lie[i][j] = term
            rows.append(_vectorize(lie, n, k))
    return rows


def scaling_rows(g, k: int):
    """Coefficient rows of phi * g over monomials phi of degree <= k."""
    n = len(g)
    rows = []
    for gamma in monomials(n, k):
        scaled = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                scaled[i][j] = monomial_shift(g[i][j], gamma, order=k)
        rows.append(_vectorize(scaled, n, k))
    return rows


def _vectorize(sym, n: int, k: int):
    """Flatten the upper triangle of a symmetric Jet array to coefficients."""
    mons = list(monomials(n, k))
    vec = []
    for i in range(n):
        for j in range(i, n):
            jet = sym[i][j]
            vec.extend(jet.coefficient(alpha) for alpha in mons)
    return vec


def orbit_matrix(g, k: int):
    """All orbit-tangent generator rows for the metric jet g."""
    return lie_derivative_rows(g, k) + scaling_rows(g, k)


def orbit_dim_bruteforce(n: int, k: int, seed: int) -> int:
    """Exact dimension of the orbit tangent span at a random metric jet.

    Raises DegenerateSample when the sampled jet is non-generic, i.e. the
    rank deficit exceeds the invariant count trdeg(n, k); callers retry
    with another seed.
    """
    g = random_metric_jet(n, k, seed)
    r = rank(orbit_matrix(g, k))
    deficit = fiber_dim(n, k) - r
    if deficit > trdeg(n, k):
        raise DegenerateSample(
            f"orbit rank deficit {deficit} exceeds trdeg({n},{k}) = {trdeg(n, k)};"
            f" seed {seed} is non-generic"
        )
    return r
