"""Tests for the symbol-space operators delta, Pi, zeta and prolongations."""

from fractions import Fraction

import pytest

from confinv.counting import dim_delta, dim_sym
from confinv.errors import NotInvertibleMetric
from confinv.exactlinalg import rank
from confinv.jets import QQ
from confinv.spencer import (
    conformal_basis,
    degree_monomials,
    invert_rational_matrix,
    iota_check,
    iota_vectors,
    pi_matrix,
    prolong,
    random_invertible_symmetric,
    spencer_delta,
    zeta,
)


def _eye(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def test_invert_rational_matrix():
    inv, det = invert_rational_matrix([[2, 1], [1, 1]])
    assert det == 1
    assert inv == [[Fraction(1), Fraction(-1)], [Fraction(-1), Fraction(2)]]
    with pytest.raises(NotInvertibleMetric):
        invert_rational_matrix([[1, 1], [1, 1]])


def test_degree_monomials_order_and_count():
    mons = degree_monomials(2, 2)
    assert mons == [(0, 2), (1, 1), (2, 0)]
    for n in (2, 3, 4):
        for k in (0, 1, 3):
            assert len(degree_monomials(n, k)) == dim_sym(n, k)


# ---------------------------------------------------------------------------
# delta
# ---------------------------------------------------------------------------


def test_delta_entries_are_zero_one():
    d = spencer_delta(3, 2)
    assert set(v for row in d.rows for v in row) <= {0, 1}


def test_delta_order_zero_is_permutation():
    d = spencer_delta(4, 0)
    assert d.shape == (16, 16)
    assert d.rank() == 16
    # Exactly one 1 per row and per column.
    assert all(sum(row) == 1 for row in d.rows)
    assert all(sum(col) == 1 for col in zip(*d.rows))


def test_delta_injective_with_expected_rank():
    d = spencer_delta(3, 2)
    assert d.shape == (9 * dim_sym(3, 2), 3 * dim_sym(3, 3))
    assert d.rank() == dim_delta(3, 3) == 30


def test_delta_second_polarization_symmetric():
    """Polarizing twice commutes: the two reindexings land on the same
    multi-index, which is the delta^2 = 0 identity of the alternated
    complex in matrix form."""
    n, k = 2, 1
    d_top = spencer_delta(n, k + 1)  # S^3 -> S^2 (x) T*
    mons_k = degree_monomials(n, k)
    mons_k1 = degree_monomials(n, k + 1)
    idx_k1 = {m: i for i, m in enumerate(mons_k1)}

    def second(psi, beta, l, m, j):
        # value of Psi at beta + e_l + e_m on vector slot j, polarized via l
        col = None
        alpha = tuple(b + (t == l) for t, b in enumerate(beta))
        row = (mons_k.index(beta) * n + j) * n + l
        out = d_top.matvec(psi)
        return out[(idx_k1[alpha] * n + j) * n + m]

    n_cols = d_top.n_cols
    for c in range(n_cols):
        psi = [QQ(0)] * n_cols
        psi[c] = QQ(1)
        for beta in mons_k:
            for j in range(n):
                for l in range(n):
                    for m in range(n):
                        assert second(psi, beta, l, m, j) == second(psi, beta, m, l, j)


# ---------------------------------------------------------------------------
# Pi
# ---------------------------------------------------------------------------


def test_pi_requires_invertible_symmetric():
    with pytest.raises(NotInvertibleMetric):
        pi_matrix(2, [[1, 1], [1, 1]])
    with pytest.raises(ValueError):
        pi_matrix(2, [[1, 2], [0, 1]])


def test_pi_kills_identity():
    p = pi_matrix(3, _eye(3))
    image = p.matvec([QQ(int(i == j)) for i in range(3) for j in range(3)])
    assert all(v == 0 for v in image)


def test_pi_fixes_symmetric_tracefree():
    p = pi_matrix(3, _eye(3))
    b = [QQ(0)] * 9
    b[0 * 3 + 1] = QQ(1)  # B^0_1
    b[1 * 3 + 0] = QQ(1)  # B^1_0: symmetric for the identity metric
    assert p.matvec(b) == b
    diag = [QQ(0)] * 9
    diag[0] = QQ(1)
    diag[4] = QQ(-1)  # trace-free diagonal
    assert p.matvec(diag) == diag


def test_pi_idempotent_with_random_metric():
    g = random_invertible_symmetric(3, 5)
    p = pi_matrix(3, g)
    pp = p.compose(p)
    assert all(a == b for ra, rb in zip(p.rows, pp.rows) for a, b in zip(ra, rb))


@pytest.mark.parametrize("n", [3, 4, 5])
def test_pi_kernel_is_conformal_algebra(n):
    g = random_invertible_symmetric(n, n)
    p = pi_matrix(n, g)
    expected = n * (n - 1) // 2 + 1
    assert p.kernel_dim() == expected
    # The explicit co(g) basis is killed entry by entry.
    for mat in conformal_basis(n, g):
        vec = [QQ(mat[i][j].numerator, mat[i][j].denominator) for i in range(n) for j in range(n)]
        assert all(v == 0 for v in p.matvec(vec))


# ---------------------------------------------------------------------------
# zeta
# ---------------------------------------------------------------------------


def test_zeta_matches_blockwise_pi_after_delta():
    """On a small case the direct assembly agrees with (1 (x) Pi) o delta."""
    n, k = 2, 1
    g = [[2, 1], [1, 1]]
    z, _ = zeta(n, k, g)
    p = pi_matrix(n, g)
    d = spencer_delta(n, k)
    n_sym = dim_sym(n, k)
    composed = []
    for b in range(n_sym):
        for e in range(n * n):
            pi_row = p.rows[e]
            row = [
                sum(
                    (pi_row[m] * d.rows[b * n * n + m][c] for m in range(n * n)),
                    Fraction(0),
                )
                for c in range(d.n_cols)
            ]
            composed.append(row)
    # Each zeta row is a positive integer rescaling of the composed row.
    for zr, cr in zip(z.rows, composed):
        for a, ea in zip(zr, cr):
            for b2, eb in zip(zr, cr):
                assert a * eb == b2 * ea, "zeta row not proportional to (1(x)Pi)delta"
        nz = [(a, ea) for a, ea in zip(zr, cr) if ea]
        assert all((a > 0) == (ea > 0) for a, ea in nz), "row scaling must be positive"


@pytest.mark.parametrize("n", [3, 4, 5])
def test_zeta_kernel_is_n_at_first_order(n):
    for seed in range(3):
        g = random_invertible_symmetric(n, seed)
        _, kd = zeta(n, 1, g)
        assert kd == n, f"n={n} seed={seed}: kernel {kd}"


@pytest.mark.parametrize("n,k", [(3, 2), (3, 3), (4, 2), (4, 3), (5, 2)])
def test_zeta_kernel_vanishes_at_higher_order(n, k):
    g = random_invertible_symmetric(n, n + k)
    _, kd = zeta(n, k, g)
    assert kd == 0, f"zeta({n},{k}): kernel {kd}"


def test_zeta_rank_at_three_two():
    z, kd = zeta(3, 2, _eye(3))
    assert kd == 0
    assert z.rank() == 30  # = dim of the order-3 inhomogeneity space


# ---------------------------------------------------------------------------
# iota and prolongations
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("n", [3, 5])
def test_iota_check_true(n):
    assert iota_check(n, _eye(n))
    assert iota_check(n, random_invertible_symmetric(n, 2 * n))


def test_iota_corrupted_sign_fails():
    """Flipping the sign of the metric term must leave Ker zeta_1."""
    n = 3
    g = _eye(n)
    z, _ = zeta(n, 1, g)
    good = iota_vectors(n, g)
    assert all(not any(z.matvec(v)) for v in good)
    from confinv.spencer import invert_rational_matrix, degree_monomials, _bump

    ginv, _ = invert_rational_matrix(g)
    mons2 = degree_monomials(n, 2)
    idx2 = {m: i for i, m in enumerate(mons2)}
    bad = []
    for m in range(n):
        vec = [Fraction(0)] * (len(mons2) * n)
        for bk in range(n):
            for bl in range(bk, n):
                alpha = _bump(_bump((0,) * n, bk), bl)
                for j in range(n):
                    val = (
                        Fraction(int(bk == m and bl == j) + int(bl == m and bk == j))
                        + ginv[j][m] * Fraction(g[bk][bl])  # wrong sign
                    )
                    if val:
                        vec[idx2[alpha] * n + j] = val
        bad.append(vec)
    assert any(any(z.matvec(v)) for v in bad)


def test_iota_vectors_independent():
    vecs = iota_vectors(4, random_invertible_symmetric(4, 9))
    assert rank(vecs) == 4


def test_prolongation_of_conformal_algebra():
    for n in (3, 4):
        g = random_invertible_symmetric(n, 7 * n)
        co = conformal_basis(n, g)
        assert len(co) == n * (n - 1) // 2 + 1
        first = prolong(co, 1)
        assert len(first) == n, f"co(g)^(1) in dim {n}: got {len(first)}"
        assert len(prolong(co, 2)) == 0


def test_prolongation_of_full_gl():
    n = 3
    gl = [
        [[Fraction(int(a == i and b == j)) for b in range(n)] for a in range(n)]
        for i in range(n)
        for j in range(n)
    ]
    assert len(prolong(gl, 1)) == n * dim_sym(n, 2)


def test_prolongation_members_satisfy_defining_conditions():
    """Every basis vector of co(g)^(1) has all its polarizations inside co(g)."""
    n = 3
    g = random_invertible_symmetric(n, 21)
    co = conformal_basis(n, g)
    flat = [[Fraction(m[a][b]) for a in range(n) for b in range(n)] for m in co]
    mons1 = degree_monomials(n, 1)
    mons2 = degree_monomials(n, 2)
    idx2 = {m: i for i, m in enumerate(mons2)}
    for psi in prolong(co, 1):
        for beta in mons1:
            endo = [
                psi[idx2[tuple(b + (t == l) for t, b in enumerate(beta))] * n + j]
                for j in range(n)
                for l in range(n)
            ]
            # endo must be a rational combination of the co(g) basis.
            assert rank(flat + [endo]) == rank(flat)
