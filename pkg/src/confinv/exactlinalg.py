"""Exact linear algebra over the rationals.

Rank and kernel computations for the symbol-space operators must not
depend on floating-point thresholds: the interesting answers sit exactly
at rank boundaries (a kernel of dimension n versus n+1 changes the
conclusion).  Everything here is therefore exact:

* ``rank`` uses fraction-free Bareiss elimination on integer matrices
  (rows are cleared of denominators first).  With gmpy2 installed the
  intermediate minors are gmpy2.mpz, which keeps the big cases fast.
* ``nullspace`` does plain rational Gauss-Jordan and returns exact basis
  vectors.
* ``rank_mod_p`` runs vectorized elimination modulo a word-sized prime.
  The modular rank is always a lower bound for the rational rank, so a
  full-column-rank result modulo p is a *certificate* that the rational
  kernel is zero.  Callers use it to shortcut the large kernel-is-zero
  checks and fall back to Bareiss when the certificate is inconclusive.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

import numpy as np

from .jets import QQ, exact_str, to_fraction

try:
    from gmpy2 import mpz
except ImportError:
    mpz = int

# Primes below 2**31 so that products of two reduced residues fit in int64
# after a remainder is taken each step.  46337**2 < 2**31.
_CERT_PRIME = 46337
_CERT_PRIME_2 = 46327


def _row_to_ints(row):
    """Scale a row of rationals to coprime integers."""
    fracs = [to_fraction(x) for x in row]
    denom_lcm = 1
    for f in fracs:
        denom_lcm = denom_lcm * f.denominator // gcd(denom_lcm, f.denominator)
    ints = [int(f * denom_lcm) for f in fracs]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g > 1:
        ints = [v // g for v in ints]
    return ints


def rank(rows) -> int:
    """Exact rank of a matrix given as a list of rows of rationals."""
    mat = [[mpz(v) for v in _row_to_ints(r)] for r in rows if any(r)]
    if not mat:
        return 0
    n_rows, n_cols = len(mat), len(mat[0])
    r = 0
    prev = mpz(1)
    for col in range(n_cols):
        pivot = None
        for i in range(r, n_rows):
            if mat[i][col]:
                pivot = i
                break
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        p = mat[r][col]
        for i in range(r + 1, n_rows):
            row_i, row_r = mat[i], mat[r]
            m = row_i[col]
            if m:
                for j in range(col, n_cols):
                    row_i[j] = (p * row_i[j] - m * row_r[j]) // prev
            else:
                # The scaling must be applied even when nothing is
                # eliminated, or later divisions by `prev` stop being exact.
                for j in range(col, n_cols):
                    row_i[j] = (p * row_i[j]) // prev
        prev = p
        r += 1
        if r == n_rows:
            break
    return r


def _modp_array(rows, p: int) -> np.ndarray:
    """Reduce a matrix (numpy array or rows of rationals) modulo p."""
    if isinstance(rows, np.ndarray):
        return rows.astype(np.int64) % p
    n_rows = len(rows)
    n_cols = len(rows[0]) if n_rows else 0
    out = np.zeros((n_rows, n_cols), dtype=np.int64)
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            if isinstance(v, int):
                out[i, j] = v % p
            else:
                f = to_fraction(v)
                out[i, j] = f.numerator * pow(f.denominator, -1, p) % p
    return out


def _eliminate_mod_p(mat: np.ndarray, p: int) -> int:
    """In-place Gaussian elimination over GF(p); returns the rank."""
    if mat.size == 0:
        return 0
    n_rows, n_cols = mat.shape
    r = 0
    for col in range(n_cols):
        nz = np.nonzero(mat[r:, col])[0]
        if nz.size == 0:
            continue
        pivot = r + nz[0]
        if pivot != r:
            mat[[r, pivot]] = mat[[pivot, r]]
        inv = pow(int(mat[r, col]), -1, p)
        head = (mat[r, col:] * inv) % p
        mat[r, col:] = head
        sub = mat[r + 1 :, col:]
        if sub.size:
            factors = sub[:, 0].copy()
            sub -= factors[:, None] * head
            sub %= p
        r += 1
        if r == n_rows:
            break
    return r


def rank_mod_p(rows, p: int = _CERT_PRIME) -> int:
    """Rank over GF(p); always a lower bound for the rational rank."""
    return _eliminate_mod_p(_modp_array(rows, p), p)


def rank_lower_bound(rows, p: int = _CERT_PRIME, seed: int = 0) -> int:
    """Certified lower bound for the rational rank, tuned for tall matrices.

    Very tall matrices are first compressed by a random matrix over
    GF(p).  The compression product is computed as a float64 matmul,
    which is exact as long as n_rows * (p-1)^2 < 2^53 (checked), and
    rank(R @ A) <= rank(A) always holds, so the result stays a valid
    lower bound whatever the random choice does.
    """
    mat = _modp_array(rows, p)
    if mat.size == 0:
        return 0
    n_rows, n_cols = mat.shape
    pad = 32
    if n_rows > n_cols + 2 * pad:
        if n_rows * (p - 1) ** 2 >= 2**53:
            raise ValueError("matrix too tall for exact float64 compression")
        rng = np.random.default_rng(seed)
        compress = rng.integers(0, p, size=(n_cols + pad, n_rows), dtype=np.int64)
        prod = compress.astype(np.float64) @ mat.astype(np.float64)
        mat = np.rint(prod).astype(np.int64) % p
    return _eliminate_mod_p(mat, p)


def kernel_is_zero(rows, n_cols: int | None = None) -> bool:
    """True iff the matrix has full column rank (exact statement).

    Tries the modular certificate first; a full-column-rank result mod p
    is already a proof.  Only a deficient modular rank (which can be an
    artifact of the prime) triggers the exact elimination.
    """
    rows = list(rows)
    if not rows:
        return (n_cols or 0) == 0
    if n_cols is None:
        n_cols = len(rows[0])
    if rank_mod_p(rows) == n_cols:
        return True
    return rank(rows) == n_cols


def nullspace(rows):
    """Exact basis for the right kernel, as lists of rationals.

    Free columns get a canonical -1 entry, so each basis vector is the
    standard RREF kernel generator.
    """
    mat = [[to_fraction(v) for v in row] for row in rows]
    if not mat:
        return []
    n_rows, n_cols = len(mat), len(mat[0])
    pivots = []
    r = 0
    for col in range(n_cols):
        pivot = None
        for i in range(r, n_rows):
            if mat[i][col]:
                pivot = i
                break
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = 1 / mat[r][col]
        mat[r] = [v * inv for v in mat[r]]
        for i in range(n_rows):
            if i != r and mat[i][col]:
                f = mat[i][col]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
        if r == n_rows:
            break
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * n_cols
        vec[fc] = Fraction(-1)
        for i, pc in enumerate(pivots):
            vec[pc] = mat[i][fc]
        basis.append([QQ(v.numerator, v.denominator) for v in vec])
    return basis


class LinOpQ:
    """Dense exact-rational matrix with optional row/column labels.

    The labels name basis elements of the symbol spaces (multi-indices
    plus tensor slots); they make kernel vectors readable and are carried
    through composition.
    """

    def __init__(self, rows, row_labels=None, col_labels=None):
        self.rows = [list(r) for r in rows]
        self.n_rows = len(self.rows)
        self.n_cols = len(self.rows[0]) if self.rows else 0
        if any(len(r) != self.n_cols for r in self.rows):
            raise ValueError("ragged matrix")
        self.row_labels = list(row_labels) if row_labels is not None else None
        self.col_labels = list(col_labels) if col_labels is not None else None

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    def rank(self) -> int:
        return rank(self.rows)

    def kernel_dim(self) -> int:
        return self.n_cols - self.rank()

    def nullspace(self):
        return nullspace(self.rows)

    def kernel_is_zero(self) -> bool:
        return kernel_is_zero(self.rows, self.n_cols)

    def matvec(self, vec):
        if len(vec) != self.n_cols:
            raise ValueError(f"length {len(vec)} vs {self.n_cols} columns")
        return [sum((r[j] * vec[j] for j in range(self.n_cols)), QQ(0)) for r in self.rows]

    def compose(self, other: "LinOpQ") -> "LinOpQ":
        """self @ other, applying ``other`` first."""
        if other.n_rows != self.n_cols:
            raise ValueError(f"inner dims {self.n_cols} vs {other.n_rows}")
        cols = list(zip(*other.rows)) if other.rows else []
        out = [
            [sum((r[m] * cols[j][m] for m in range(self.n_cols)), QQ(0))
             for j in range(other.n_cols)]
            for r in self.rows
        ]
        return LinOpQ(out, row_labels=self.row_labels, col_labels=other.col_labels)

    def to_json_dict(self) -> dict:
        return {
            "shape": [self.n_rows, self.n_cols],
            "entries": [[exact_str(v) for v in r] for r in self.rows],
        }

    def __repr__(self):
        return f"LinOpQ({self.n_rows}x{self.n_cols})"
