"""Dimension counts for conformal-structure jets.

Closed-form side of the story: symbol-space dimensions, the Hilbert function
H_n(k) counting independent scalar invariants of pure order k, its cumulative
transcendence degree, and the Poincare generating function.  Everything here
is exact integer/rational arithmetic; the independent cross-checks live in
``spencer`` (operator ranks) and ``orbits`` (brute-force orbit dimensions).

Conventions: n is the manifold dimension (n >= 3; there are no local
conformal invariants in 2D), k the jet order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DimensionTooSmall
from .jets import QQ
from .ratfunc import Poly, RatFunc


def dim_sym(n: int, k: int) -> int:
    """Dimension of degree-k symmetric forms in n variables: C(n+k-1, k)."""
    if n < 1 or k < 0:
        raise DimensionTooSmall(f"dim_sym needs n >= 1, k >= 0; got ({n}, {k})")
    return math.comb(n + k - 1, k)


def dim_vertical(n: int) -> int:
    """Dimension of symmetric trace-free endomorphisms: n(n+1)/2 - 1.

    This is the fiberwise tangent space of the conformal-class bundle: a
    symmetric perturbation of the metric modulo pure rescaling.
    """
    if n < 2:
        raise DimensionTooSmall("dim_vertical needs n >= 2")
    return n * (n + 1) // 2 - 1


def dim_symbol(n: int, k: int) -> int:
    """Dimension of the order-k symbol space (vertical directions times S^k)."""
    return dim_vertical(n) * dim_sym(n, k)


def dim_delta(n: int, k: int) -> int:
    """Dimension of the k-th graded piece of the diffeomorphism jet group.

    Identified with S^k T* (x) T, so n * C(n+k-1, k); for k = 1 this is the
    full n^2 of GL(T).
    """
    return n * dim_sym(n, k)


def dim_diff_group(n: int, k: int) -> int:
    """Dimension of the group of k-jets of diffeomorphisms fixing a point."""
    return sum(dim_delta(n, i) for i in range(1, k + 1))


def dim_weyl_space(n: int) -> int:
    """Dimension of the space of algebraic Weyl tensors at a point."""
    if n < 3:
        raise DimensionTooSmall("dim_weyl_space needs n >= 3")
    return (n - 3) * n * (n + 1) * (n + 2) // 12


def _hilbert_tail(n: int, k: int) -> int:
    """The k > 3 closed form: (n(k-1)/2) C(n+k-1, k+1) - C(n+k-1, k)."""
    val = QQ(n * (k - 1), 2) * math.comb(n + k - 1, k + 1) - math.comb(n + k - 1, k)
    assert val.denominator == 1, f"tail formula not integral at ({n}, {k})"
    return int(val)


def hilbert(n: int, k: int) -> int:
    """Number of independent scalar conformal invariants of pure order k."""
    if n < 3:
        raise DimensionTooSmall(
            f"no local conformal invariants exist for n = {n} < 3"
        )
    if k < 0:
        raise DimensionTooSmall("jet order must be >= 0")
    if k <= 1:
        return 0
    if n == 3:
        # 3D is exceptional through order 4: the Weyl tensor vanishes and the
        # first invariant appears at order 3 via the Cotton tensor.
        if k == 2:
            return 0
        if k == 3:
            return 1
        if k == 4:
            return 9
        return k * k - 4
    if k == 2:
        num = n**4 - 13 * n**2 - 12
        assert num % 12 == 0
        return num // 12
    if k == 3:
        num = n * (n**4 + 2 * n**3 - 5 * n**2 - 14 * n - 32)
        assert num % 24 == 0
        return num // 24
    return _hilbert_tail(n, k)


def trdeg(n: int, k: int) -> int:
    """Transcendence degree of the order-<=k invariants field: sum of hilbert."""
    return sum(hilbert(n, j) for j in range(k + 1))


# --- Poincare function ---


def _binomial_poly(shift_count: int) -> Poly:
    """C(k + j, j) as a polynomial in k: prod_{i=1..j} (k + i) / j!."""
    p = Poly([1])
    for i in range(1, shift_count + 1):
        p = p * Poly([i, 1])
    return p * (QQ(1) / math.factorial(shift_count))


def _tail_poly(n: int) -> Poly:
    """The k > 3 Hilbert closed form as a polynomial in k (degree n - 1)."""
    # C(n+k-1, k+1) = prod_{i=2..n-1}(k+i)/(n-2)!,
    # C(n+k-1, k)   = prod_{i=1..n-1}(k+i)/(n-1)!.
    a = Poly([1])
    for i in range(2, n):
        a = a * Poly([i, 1])
    a = a * (QQ(1) / math.factorial(n - 2))
    b = Poly([1])
    for i in range(1, n):
        b = b * Poly([i, 1])
    b = b * (QQ(1) / math.factorial(n - 1))
    return Poly([QQ(-n, 2), QQ(n, 2)]) * a - b


def poincare(n: int) -> RatFunc:
    """Generating function sum_k hilbert(n, k) z^k, as a reduced RatFunc.

    hilbert(n, k) agrees with a degree-(n-1) polynomial in k for k >= 5
    (k >= 4 already for n >= 4), so the series is a rational function with
    denominator (1 - z)^n plus finitely many corrections.
    """
    if n < 3:
        raise DimensionTooSmall("poincare needs n >= 3")
    tail = _tail_poly(n)
    # write tail in the binomial basis C(k+j, j), highest degree first
    rest = tail
    result = RatFunc(Poly([0]))
    one_minus_z = Poly([1, -1])
    for j in range(tail.degree, -1, -1):
        basis = _binomial_poly(j)
        a_j = rest[j] / basis[j]
        rest = rest - basis * a_j
        result = result + RatFunc(Poly([a_j]), one_minus_z ** (j + 1))
    assert rest.is_zero()
    # corrections where the piecewise definition departs from the tail poly
    corr = [QQ(hilbert(n, k)) - tail.evaluate(QQ(k)) for k in range(5)]
    result = result + RatFunc(Poly(corr))
    return result


def poincare_general(n: int) -> RatFunc:
    """A single closed expression for the generating function, all n >= 3.

    ((n+1)n z - 2(n+z)) / (2 z (1-z)^n) + n (1/z + z - z^3)
    + (C(n,2)+1)(1 - z^2).  Intended for n >= 4; see
    :func:`poincare_general_check` for how it fares at n = 3.
    """
    z = Poly.x()
    one_minus_z = Poly([1, -1])
    t1 = RatFunc(
        Poly([-2 * n, (n + 1) * n - 2]), Poly([2]) * z * one_minus_z**n
    )
    t2 = RatFunc(Poly([n]), z) + RatFunc(Poly([0, n, 0, -n]))
    t3 = RatFunc(Poly([1, 0, -1]) * (math.comb(n, 2) + 1))
    return t1 + t2 + t3


def poincare_general_check(n: int) -> bool:
    """True iff the single closed expression equals the true Poincare function."""
    return poincare_general(n) == poincare(n)


def asymptotic_check(n: int, K: int) -> float:
    """Ratio hilbert(n, K) / leading asymptotic form; -> 1 as K grows.

    The leading form is ((n^2-n-2)/2) K^(n-1) / (n-1)!.
    """
    if K < 1:
        raise DimensionTooSmall("asymptotic_check needs K >= 1")
    leading = QQ((n * n - n - 2), 2) * QQ(K ** (n - 1), math.factorial(n - 1))
    return float(QQ(hilbert(n, K)) / leading)


@dataclass
class CountReport:
    """Bundle of counts for one (n, k), plus any rank checks performed."""

    n: int
    k: int
    dim_symbol: int
    dim_delta: int
    hilbert: int
    trdeg: int
    ranks: dict = field(default_factory=dict)
    kernel_dims: dict = field(default_factory=dict)

    @staticmethod
    def build(n: int, k: int) -> "CountReport":
        return CountReport(
            n=n,
            k=k,
            dim_symbol=dim_symbol(n, k),
            dim_delta=dim_delta(n, k),
            hilbert=hilbert(n, k),
            trdeg=trdeg(n, k),
        )

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "dim_symbol": self.dim_symbol,
            "dim_delta": self.dim_delta,
            "hilbert": self.hilbert,
            "trdeg": self.trdeg,
            "ranks": dict(sorted(self.ranks.items())),
            "kernel_dims": dict(sorted(self.kernel_dims.items())),
        }
