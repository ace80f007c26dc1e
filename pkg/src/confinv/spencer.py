"""Symbol-space operators: polarization, metric projection, prolongations.

The operators realized here act between the spaces

    S^{k+1}T* (x) T   --delta-->   S^k T* (x) T* (x) T   --(1 (x) Pi)-->  ...

where T is the tangent space of dimension n.  An element of S^k T* (x) T
is stored by its *values on basis vectors*: the vector slot is an index
j, the symmetric slot is a degree-k multi-index alpha, and the stored
number is Psi^j(e_{i_1},..,e_{i_k}) for alpha = e_{i_1}+..+e_{i_k}.
With this convention the polarization operator

    (delta Psi)^j_{beta;l} = Psi^j_{beta + e_l}

is a pure reindexing, so its matrix has 0/1 entries, and no multinomial
bookkeeping appears anywhere.

Endomorphisms B in T* (x) T are flattened as vec(B)[i*n + j] = B^i_j
(upper index major).  The metric projection

    Pi(B)^i_j = (B^i_j + g^{ik} B^l_k g_{lj}) / 2 - (1/n) B^k_k delta^i_j

kills exactly the conformal algebra co(g) = so(g) + R*Id and fixes the
g-symmetric trace-free part.  The composition zeta_k = (1 (x) Pi) o delta
is assembled directly into its (sparse, integer-scaled) matrix rather
than through a dense product; each row of zeta is a row of Pi placed at
shifted multi-indices, so per-row integer scaling stays consistent.

Kernel dimensions of the large zeta matrices are certified exactly by a
sandwich: explicit rational kernel vectors (checked by exact matvec)
give a lower bound on the kernel, a modular rank gives a lower bound on
the rank, and when the two meet the dimension is proved.  If they do not
meet, the code falls back to fraction-free Bareiss elimination.
"""

from __future__ import annotations

import random
from fractions import Fraction

import numpy as np

from .counting import dim_sym
from .errors import NotInvertibleMetric
from .exactlinalg import (
    _CERT_PRIME,
    _CERT_PRIME_2,
    LinOpQ,
    _row_to_ints,
    nullspace,
    rank,
    rank_lower_bound,
)
from .jets import QQ, monomials


def degree_monomials(n: int, k: int) -> list[tuple[int, ...]]:
    """All multi-indices of exact degree k, in the canonical order."""
    return [m for m in monomials(n, k) if sum(m) == k]


def _bump(alpha: tuple[int, ...], l: int) -> tuple[int, ...]:
    return tuple(a + (t == l) for t, a in enumerate(alpha))


def invert_rational_matrix(g):
    """Exact inverse and determinant of a square rational matrix."""
    n = len(g)
    aug = [
        [Fraction(g[i][j]) for j in range(n)]
        + [Fraction(1 if i == j else 0) for j in range(n)]
        for i in range(n)
    ]
    det = Fraction(1)
    for col in range(n):
        pivot = next((i for i in range(col, n) if aug[i][col]), None)
        if pivot is None:
            raise NotInvertibleMetric(f"matrix is singular (column {col})")
        if pivot != col:
            aug[col], aug[pivot] = aug[pivot], aug[col]
            det = -det
        det *= aug[col][col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for i in range(n):
            if i != col and aug[i][col]:
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[col])]
    return [row[n:] for row in aug], det


def _check_symmetric(g):
    n = len(g)
    for i in range(n):
        if len(g[i]) != n:
            raise ValueError("g-value must be square")
        for j in range(i):
            if Fraction(g[i][j]) != Fraction(g[j][i]):
                raise ValueError("g-value must be symmetric")


def pi_matrix(n: int, g) -> LinOpQ:
    """Matrix of the projection onto g-symmetric trace-free endomorphisms.

    Kernel is co(g), of dimension n(n-1)/2 + 1.
    """
    _check_symmetric(g)
    ginv, _ = invert_rational_matrix(g)
    gq = [[Fraction(v) for v in row] for row in g]
    half = Fraction(1, 2)
    rows = []
    labels = [f"{i}_{j}" for i in range(n) for j in range(n)]
    for i in range(n):
        for j in range(n):
            row = [Fraction(0)] * (n * n)
            for bk in range(n):
                for bl in range(n):
                    val = half * ginv[i][bl] * gq[bk][j]
                    if bk == i and bl == j:
                        val += half
                    if i == j and bk == bl:
                        val -= Fraction(1, n)
                    row[bk * n + bl] = val
            rows.append(row)
    return LinOpQ(rows, row_labels=labels, col_labels=labels)


def spencer_delta(n: int, k: int) -> LinOpQ:
    """Polarization S^{k+1}T*(x)T -> S^k T*(x)T*(x)T as a 0/1 matrix."""
    mons_k = degree_monomials(n, k)
    mons_k1 = degree_monomials(n, k + 1)
    col_of = {m: i for i, m in enumerate(mons_k1)}
    n_rows = len(mons_k) * n * n
    n_cols = len(mons_k1) * n
    rows = [[0] * n_cols for _ in range(n_rows)]
    for b, beta in enumerate(mons_k):
        for l in range(n):
            a = col_of[_bump(beta, l)]
            for j in range(n):
                rows[b * n * n + j * n + l][a * n + j] = 1
    row_labels = [
        f"{beta}|{j}_{l}" for beta in mons_k for j in range(n) for l in range(n)
    ]
    col_labels = [f"{alpha}|{j}" for alpha in mons_k1 for j in range(n)]
    return LinOpQ(rows, row_labels=row_labels, col_labels=col_labels)


def iota_vectors(n: int, g):
    """Exact images of the dual basis under the first-prolongation embedding.

    iota(p)^j_{kl} = p_k d^j_l + p_l d^j_k - g^{ij} p_i g_{kl}; each image
    lies in Ker zeta_1 and the map is injective.
    """
    _check_symmetric(g)
    ginv, _ = invert_rational_matrix(g)
    gq = [[Fraction(v) for v in row] for row in g]
    mons2 = degree_monomials(n, 2)
    idx2 = {m: i for i, m in enumerate(mons2)}
    vecs = []
    for m in range(n):
        vec = [Fraction(0)] * (len(mons2) * n)
        for bk in range(n):
            for bl in range(bk, n):
                alpha = _bump(_bump((0,) * n, bk), bl)
                for j in range(n):
                    val = (
                        Fraction(int(bk == m and bl == j) + int(bl == m and bk == j))
                        - ginv[j][m] * gq[bk][bl]
                    )
                    if val:
                        vec[idx2[alpha] * n + j] = val
        vecs.append(vec)
    return vecs


def zeta(n: int, k: int, g) -> tuple[LinOpQ, int]:
    """Matrix of zeta_k = (1 (x) Pi) o delta and its exact kernel dimension.

    The returned matrix has integer entries (each row of Pi is scaled to
    coprime integers), which changes neither rank nor kernel.
    """
    pi = pi_matrix(n, g)
    pi_int = [_row_to_ints(r) for r in pi.rows]
    mons_k = degree_monomials(n, k)
    mons_k1 = degree_monomials(n, k + 1)
    col_of = {m: i for i, m in enumerate(mons_k1)}
    n_rows = len(mons_k) * n * n
    n_cols = len(mons_k1) * n
    rows = [[0] * n_cols for _ in range(n_rows)]
    for b, beta in enumerate(mons_k):
        for l in range(n):
            a = col_of[_bump(beta, l)]
            for i in range(n):
                for j in range(n):
                    target = rows[b * n * n + i * n + j]
                    prow = pi_int[i * n + j]
                    for bk in range(n):
                        v = prow[bk * n + l]
                        if v:
                            target[a * n + bk] = v
    op = LinOpQ(
        rows,
        col_labels=[f"{alpha}|{j}" for alpha in mons_k1 for j in range(n)],
    )
    witnesses = []
    if k == 1:
        candidates = iota_vectors(n, g)
        if all(not any(op.matvec(v)) for v in candidates) and rank(candidates) == len(
            candidates
        ):
            witnesses = candidates
    kernel_dim = None
    arr = np.array(rows, dtype=np.int64)
    for p, seed in ((_CERT_PRIME, 0), (_CERT_PRIME_2, 1)):
        r_low = rank_lower_bound(arr, p=p, seed=seed)
        if n_cols - r_low == len(witnesses):
            kernel_dim = len(witnesses)
            break
    if kernel_dim is None:
        kernel_dim = n_cols - rank(rows)
    return op, kernel_dim


def iota_check(n: int, g) -> bool:
    """True iff the explicit embedding lands in Ker zeta_1 injectively."""
    op, _ = zeta(n, 1, g)
    vecs = iota_vectors(n, g)
    if any(any(op.matvec(v)) for v in vecs):
        return False
    return rank(vecs) == len(vecs)


def conformal_basis(n: int, g):
    """Basis of co(g): g-skew endomorphisms plus the identity."""
    ginv, _ = invert_rational_matrix(g)
    basis = []
    for u in range(n):
        for v in range(u + 1, n):
            # B = g^{-1} A for A = E_uv - E_vu, so g B is skew.
            mat = [[ginv[i][u] * Fraction(int(j == v)) - ginv[i][v] * Fraction(int(j == u))
                    for j in range(n)] for i in range(n)]
            basis.append(mat)
    basis.append([[Fraction(int(i == j)) for j in range(n)] for i in range(n)])
    return basis


def prolong(h_basis, i: int):
    """Basis of the i-th prolongation h^(i) = S^{i+1}T*(x)T  ∩  S^i T*(x)h.

    ``h_basis`` is a list of n-by-n rational matrices spanning h inside
    T*(x)T.  Returns exact basis vectors in the S^{i+1}T*(x)T coordinates.
    """
    n = len(h_basis[0])
    flat = [[Fraction(mat[a][b]) for a in range(n) for b in range(n)] for mat in h_basis]
    conditions = nullspace(flat)
    mons_i = degree_monomials(n, i)
    mons_i1 = degree_monomials(n, i + 1)
    col_of = {m: t for t, m in enumerate(mons_i1)}
    n_cols = len(mons_i1) * n
    if not conditions:
        basis = []
        for t in range(n_cols):
            vec = [QQ(0)] * n_cols
            vec[t] = QQ(1)
            basis.append(vec)
        return basis
    rows = []
    for beta in mons_i:
        for f in conditions:
            row = [Fraction(0)] * n_cols
            for j in range(n):
                for l in range(n):
                    if f[j * n + l]:
                        row[col_of[_bump(beta, l)] * n + j] += Fraction(
                            f[j * n + l].numerator, f[j * n + l].denominator
                        )
            rows.append(row)
    # a full-column-rank certificate over GF(p) proves the kernel empty
    # without exact elimination (modular rank never exceeds rational rank)
    for p, seed in ((_CERT_PRIME, 0), (_CERT_PRIME_2, 1)):
        if rank_lower_bound(rows, p=p, seed=seed) == n_cols:
            return []
    return nullspace(rows)


def random_invertible_symmetric(n: int, seed: int):
    """Random symmetric integer matrix with nonzero determinant."""
    rng = random.Random(seed)
    while True:
        g = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                g[i][j] = g[j][i] = rng.randint(-4, 4)
        try:
            invert_rational_matrix(g)
        except NotInvertibleMetric:
            continue
        return g
