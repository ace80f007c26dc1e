"""Jet-order tensor calculus: curvature pipeline for metric jets.

Conventions, fixed once and locked by tests:

* Christoffel symbols: G^k_ij = g^{kl}(d_i g_jl + d_j g_il - d_l g_ij)/2,
  stored with slot order (k; i, j), variance ('u','l','l').
* Curvature: R^a_ijk = d_i G^a_jk - d_j G^a_ik + G^a_im G^m_jk
  - G^a_jm G^m_ik, slots (a; i, j, k).  Ricci is the trace Ric_jk =
  R^i_ijk, and with this sign the unit round sphere has scalar
  curvature +2 in 2D (+n(n-1) in general).
* The lowered curvature is Rm[i,j,k,l] = g_{la} R^a_ijk; it is
  antisymmetric in (i,j) and in (k,l) and symmetric under pair exchange.
* The trace-free part of curvature subtracts the Kulkarni-Nomizu product
  of the Schouten tensor P = (Ric - R g/(2(n-1)))/(n-2) with g:
  W[i,j,k,l] = Rm[i,j,k,l] - (P_li g_kj - P_lj g_ki + g_li P_kj
  - g_lj P_ki), and the exported (3,1) tensor raises the last slot,
  which makes it invariant under g -> e^{2f} g componentwise.
* The conformal (0,3) tensor in three dimensions is
  C_ijk = cov_i P_jk - cov_j P_ik (covariant derivative slot in front).

Everything is computed on Jet coefficients; exact inputs stay exact
through the entire pipeline.  Truncation follows the jets module's
min-order contract, so e.g. a curvature of an order-k metric jet has
order k-2.
"""

from __future__ import annotations

import itertools
import warnings
from fractions import Fraction

from .errors import (
    DimensionTooSmall,
    NotInvertibleMetric,
    OrderTooLow,
    RankMismatch,
    SignatureMismatch,
    SingularJacobian,
    WrongDimension,
)
from .jets import QQ, Jet, compose, differentiate, invert, power, to_fraction


def _indices(dim: int, slots: int):
    return itertools.product(range(dim), repeat=slots)


class TensorJet:
    """Dense array of Jets with per-slot variance ('l' lower, 'u' upper)."""

    __slots__ = ("dim", "variance", "comps", "symmetries")

    def __init__(self, dim, variance, comps, symmetries=()):
        variance = tuple(variance)
        if any(v not in ("l", "u") for v in variance):
            raise ValueError(f"variance must be 'l'/'u' letters, got {variance}")
        comps = dict(comps)
        orders = {jet.order for jet in comps.values()}
        backends = {jet.backend for jet in comps.values()}
        if len(orders) > 1 or len(backends) > 1:
            raise ValueError("component jets must share order and backend")
        for idx in _indices(dim, len(variance)):
            if idx not in comps:
                raise ValueError(f"missing component {idx}")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "variance", variance)
        object.__setattr__(self, "comps", comps)
        object.__setattr__(self, "symmetries", tuple(symmetries))

    def __setattr__(self, name, value):
        raise AttributeError("TensorJet is immutable")

    @staticmethod
    def zero(dim, variance, order, backend="exact"):
        z = Jet.zero(dim, order, backend)
        return TensorJet(dim, variance, {i: z for i in _indices(dim, len(variance))})

    @property
    def n_slots(self) -> int:
        return len(self.variance)

    @property
    def order(self) -> int:
        return next(iter(self.comps.values())).order

    @property
    def backend(self) -> str:
        return next(iter(self.comps.values())).backend

    def __getitem__(self, idx):
        if isinstance(idx, int):
            idx = (idx,)
        return self.comps[tuple(idx)]

    def map(self, fn) -> "TensorJet":
        return TensorJet(
            self.dim,
            self.variance,
            {i: fn(j) for i, j in self.comps.items()},
            self.symmetries,
        )

    def __add__(self, other: "TensorJet") -> "TensorJet":
        if self.variance != other.variance or self.dim != other.dim:
            raise RankMismatch("tensor shapes differ")
        return TensorJet(
            self.dim,
            self.variance,
            {i: self.comps[i] + other.comps[i] for i in self.comps},
        )

    def __sub__(self, other: "TensorJet") -> "TensorJet":
        return self + other.map(lambda j: -j)

    def scale(self, s) -> "TensorJet":
        return self.map(lambda j: j * s)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TensorJet)
            and self.variance == other.variance
            and self.comps == other.comps
        )

    __hash__ = None

    def max_coeff_diff(self, other: "TensorJet") -> float:
        return max(
            (self.comps[i] - other.comps[i]).max_abs_coeff() for i in self.comps
        )

    def check_symmetries(self) -> bool:
        """Exact verification of the declared pair symmetries."""
        for kind, (s1, s2) in self.symmetries:
            sign = 1 if kind == "sym" else -1
            for idx in self.comps:
                swapped = list(idx)
                swapped[s1], swapped[s2] = swapped[s2], swapped[s1]
                if self.comps[idx] != sign * self.comps[tuple(swapped)]:
                    return False
        return True

    def __repr__(self):
        return f"TensorJet(dim={self.dim}, variance={''.join(self.variance)}, order={self.order})"


def _inertia(value):
    """Exact inertia (n_plus, n_minus, n_zero) of a symmetric rational matrix.

    Congruence diagonalization: symmetric row+column elimination, with the
    standard fix (add row/col) when a diagonal pivot vanishes.
    """
    n = len(value)
    m = [[to_fraction(v) for v in row] for row in value]
    plus = minus = zero = 0
    for t in range(n):
        if m[t][t] == 0:
            swap = next((r for r in range(t + 1, n) if m[r][r] != 0), None)
            if swap is not None:
                m[t], m[swap] = m[swap], m[t]
                for row in m:
                    row[t], row[swap] = row[swap], row[t]
            else:
                off = next((r for r in range(t + 1, n) if m[r][t] != 0), None)
                if off is None:
                    zero += 1
                    continue
                for c in range(n):
                    m[t][c] += m[off][c]
                for r in range(n):
                    m[r][t] += m[r][off]
        pivot = m[t][t]
        if pivot > 0:
            plus += 1
        else:
            minus += 1
        for r in range(t + 1, n):
            if m[r][t]:
                f = m[r][t] / pivot
                for c in range(n):
                    m[r][c] -= f * m[t][c]
                for rr in range(n):
                    m[rr][r] -= f * m[rr][t]
    return plus, minus, zero


class MetricJet:
    """Symmetric invertible (0,2) jet with signature and basepoint."""

    __slots__ = ("tensor", "signature", "basepoint")

    def __init__(self, tensor: TensorJet, signature=None, basepoint=None):
        n = tensor.dim
        if tensor.variance != ("l", "l"):
            raise RankMismatch("metric must be a (0,2) tensor")
        for i in range(n):
            for j in range(n):
                if tensor[i, j] != tensor[j, i]:
                    raise ValueError("metric components must be symmetric")
        value = [[tensor[i, j].value() for j in range(n)] for i in range(n)]
        if tensor.backend == "exact":
            plus, minus, zero = _inertia(value)
        else:
            import numpy as np

            eigs = np.linalg.eigvalsh(np.array(value, dtype=float))
            plus = int((eigs > 1e-12).sum())
            minus = int((eigs < -1e-12).sum())
            zero = n - plus - minus
        if zero:
            raise NotInvertibleMetric("metric value matrix is singular")
        if signature is None:
            signature = (plus, minus)
        elif tuple(signature) != (plus, minus):
            raise SignatureMismatch(
                f"declared signature {tuple(signature)}, value matrix has ({plus},{minus})"
            )
        object.__setattr__(self, "tensor", tensor)
        object.__setattr__(self, "signature", tuple(signature))
        object.__setattr__(
            self, "basepoint", tuple(basepoint) if basepoint is not None else (0,) * n
        )

    def __setattr__(self, name, value):
        raise AttributeError("MetricJet is immutable")

    @staticmethod
    def from_components(comps, signature=None, basepoint=None) -> "MetricJet":
        """Build from an n x n nested list of Jets."""
        n = len(comps)
        tensor = TensorJet(
            n,
            ("l", "l"),
            {(i, j): comps[i][j] for i in range(n) for j in range(n)},
            symmetries=(("sym", (0, 1)),),
        )
        return MetricJet(tensor, signature=signature, basepoint=basepoint)

    @property
    def dim(self) -> int:
        return self.tensor.dim

    @property
    def order(self) -> int:
        return self.tensor.order

    @property
    def backend(self) -> str:
        return self.tensor.backend

    def component(self, i, j) -> Jet:
        return self.tensor[i, j]

    def value_matrix(self):
        n = self.dim
        return [[self.tensor[i, j].value() for j in range(n)] for i in range(n)]

    def scale(self, s) -> "MetricJet":
        factor = to_fraction(s) if self.backend == "exact" else float(s)
        if factor == 0:
            raise NotInvertibleMetric("zero scaling")
        sig = self.signature if factor > 0 else (self.signature[1], self.signature[0])
        return MetricJet(self.tensor.scale(s), signature=sig, basepoint=self.basepoint)

    def __repr__(self):
        return (
            f"MetricJet(dim={self.dim}, order={self.order},"
            f" signature={self.signature}, backend={self.backend!r})"
        )


class DiffeoJet:
    """Jet of an origin-preserving diffeomorphism germ."""

    __slots__ = ("comps",)

    def __init__(self, comps):
        comps = list(comps)
        n = len(comps)
        for jet in comps:
            if jet.dim != n:
                raise RankMismatch("component count must equal jet dimension")
            if jet.value() != 0:
                raise ValueError("diffeo jet must fix the origin")
        lin = [
            [to_fraction(jet.coefficient(tuple(int(t == j) for t in range(n))))
             if jet.backend == "exact"
             else jet.coefficient(tuple(int(t == j) for t in range(n)))
             for j in range(n)]
            for jet in comps
        ]
        if comps[0].backend == "exact":
            if _rational_det(lin) == 0:
                raise SingularJacobian("linear part is singular")
        else:
            import numpy as np

            if abs(np.linalg.det(np.array(lin, dtype=float))) < 1e-12:
                raise SingularJacobian("linear part is singular")
        object.__setattr__(self, "comps", comps)

    def __setattr__(self, name, value):
        raise AttributeError("DiffeoJet is immutable")

    @property
    def dim(self) -> int:
        return len(self.comps)

    @property
    def order(self) -> int:
        return self.comps[0].order

    def after(self, other: "DiffeoJet") -> "DiffeoJet":
        """Composition self o other as jets."""
        return DiffeoJet([compose(c, other.comps) for c in self.comps])


def _rational_det(mat):
    n = len(mat)
    if n == 1:
        return mat[0][0]
    total = Fraction(0)
    for c in range(n):
        minor = [row[:c] + row[c + 1 :] for row in mat[1:]]
        total += (-1) ** c * Fraction(mat[0][c]) * _rational_det(minor)
    return total


# ---------------------------------------------------------------------------
# Metric inverse and Christoffel symbols
# ---------------------------------------------------------------------------


def inverse_metric(g: MetricJet) -> TensorJet:
    """Jet-valued inverse: g^{ik} g_{kj} = delta^i_j exactly to order.

    Gauss-Jordan over the jet ring; pivots are inverted with the
    geometric-series inverse, so a pivot only needs a nonzero value.
    """
    n = g.dim
    aug = [
        [g.component(i, j) for j in range(n)]
        + [
            Jet.constant(n, g.order, 1 if i == j else 0, g.backend)
            for j in range(n)
        ]
        for i in range(n)
    ]
    for col in range(n):
        pivot = next(
            (r for r in range(col, n) if aug[r][col].value() != 0), None
        )
        if pivot is None:
            raise NotInvertibleMetric("metric value matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = invert(aug[col][col])
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col:
                f = aug[r][col]
                if not f.is_zero():
                    aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    comps = {
        (i, j): aug[i][n + j] for i in range(n) for j in range(n)
    }
    return TensorJet(n, ("u", "u"), comps, symmetries=(("sym", (0, 1)),))


def christoffel(g: MetricJet) -> TensorJet:
    """Levi-Civita connection coefficients, slots (k; i, j)."""
    if g.order < 1:
        raise OrderTooLow("christoffel needs a metric jet of order >= 1")
    n = g.dim
    ginv = inverse_metric(g)
    half = QQ(1, 2) if g.backend == "exact" else 0.5
    dg = [
        [[differentiate(g.component(i, j), m) for m in range(n)] for j in range(n)]
        for i in range(n)
    ]
    comps = {}
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                total = Jet.zero(n, g.order - 1, g.backend)
                for l in range(n):
                    total = total + ginv[k, l] * (dg[j][l][i] + dg[i][l][j] - dg[i][j][l])
                comps[(k, i, j)] = comps[(k, j, i)] = total * half
    return TensorJet(n, ("u", "l", "l"), comps, symmetries=(("sym", (1, 2)),))


# ---------------------------------------------------------------------------
# Curvature
# ---------------------------------------------------------------------------


def riemann(g: MetricJet) -> TensorJet:
    """Curvature R^a_ijk of the Levi-Civita connection, slots (a; i, j, k)."""
    if g.order < 2:
        raise OrderTooLow("curvature needs a metric jet of order >= 2")
    n = g.dim
    gamma = christoffel(g)
    dgamma = {
        (a, i, j, k): differentiate(gamma[a, j, k], i)
        for a in range(n)
        for i in range(n)
        for j in range(n)
        for k in range(n)
    }
    comps = {}
    for a in range(n):
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if i == j:
                        comps[(a, i, j, k)] = Jet.zero(n, g.order - 2, g.backend)
                        continue
                    if i > j:
                        comps[(a, i, j, k)] = -comps[(a, j, i, k)]
                        continue
                    total = dgamma[(a, i, j, k)] - dgamma[(a, j, i, k)]
                    for m in range(n):
                        total = total + (
                            gamma[a, i, m] * gamma[m, j, k]
                            - gamma[a, j, m] * gamma[m, i, k]
                        )
                    comps[(a, i, j, k)] = total
    return TensorJet(n, ("u", "l", "l", "l"), comps, symmetries=(("antisym", (1, 2)),))


def ricci(g: MetricJet) -> TensorJet:
    """Ric_jk = R^i_ijk."""
    n = g.dim
    rm = riemann(g)
    comps = {}
    for j in range(n):
        for k in range(n):
            total = Jet.zero(n, rm.order, g.backend)
            for i in range(n):
                total = total + rm[i, i, j, k]
            comps[(j, k)] = total
    return TensorJet(n, ("l", "l"), comps, symmetries=(("sym", (0, 1)),))


def scalar_curvature(g: MetricJet) -> Jet:
    n = g.dim
    ric = ricci(g)
    ginv = inverse_metric(g)
    total = Jet.zero(n, ric.order, g.backend)
    for j in range(n):
        for k in range(n):
            total = total + ginv[j, k] * ric[j, k]
    return total


def schouten(g: MetricJet) -> TensorJet:
    """P = (Ric - R g/(2(n-1))) / (n-2)."""
    n = g.dim
    if n < 3:
        raise DimensionTooSmall("schouten tensor needs dimension >= 3")
    ric = ricci(g)
    sc = scalar_curvature(g)
    if g.backend == "exact":
        c1, c2 = QQ(1, n - 2), QQ(1, 2 * (n - 1))
    else:
        c1, c2 = 1.0 / (n - 2), 1.0 / (2 * (n - 1))
    comps = {
        (i, j): (ric[i, j] - sc * g.component(i, j) * c2) * c1
        for i in range(n)
        for j in range(n)
    }
    return TensorJet(n, ("l", "l"), comps, symmetries=(("sym", (0, 1)),))


def lower_slot(t: TensorJet, g: MetricJet, slot: int) -> TensorJet:
    if t.variance[slot] != "u":
        raise RankMismatch(f"slot {slot} is not contravariant")
    n = t.dim
    comps = {}
    for idx in _indices(n, t.n_slots):
        total = None
        for m in range(n):
            src = list(idx)
            src[slot] = m
            term = g.component(idx[slot], m) * t[tuple(src)]
            total = term if total is None else total + term
        comps[idx] = total
    variance = list(t.variance)
    variance[slot] = "l"
    return TensorJet(n, variance, comps)


def raise_slot(t: TensorJet, ginv: TensorJet, slot: int) -> TensorJet:
    if t.variance[slot] != "l":
        raise RankMismatch(f"slot {slot} is not covariant")
    n = t.dim
    comps = {}
    for idx in _indices(n, t.n_slots):
        total = None
        for m in range(n):
            src = list(idx)
            src[slot] = m
            term = ginv[idx[slot], m] * t[tuple(src)]
            total = term if total is None else total + term
        comps[idx] = total
    variance = list(t.variance)
    variance[slot] = "u"
    return TensorJet(n, variance, comps)


def riemann_lowered(g: MetricJet) -> TensorJet:
    """Rm[i,j,k,l] = g_{la} R^a_ijk: both pairs antisymmetric."""
    rm = riemann(g)
    n = g.dim
    comps = {}
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    total = None
                    for a in range(n):
                        term = g.component(l, a) * rm[a, i, j, k]
                        total = term if total is None else total + term
                    comps[(i, j, k, l)] = total
    return TensorJet(
        n,
        ("l", "l", "l", "l"),
        comps,
        symmetries=(("antisym", (0, 1)), ("antisym", (2, 3))),
    )


def weyl(g: MetricJet) -> TensorJet:
    """Trace-free conformal curvature as a (3,1) tensor, slots (i,j,k; l).

    For n = 3 the tensor vanishes identically; a zero tensor is returned
    with a warning so that dispatch code stays uniform.
    """
    n = g.dim
    if g.order < 2:
        raise OrderTooLow("curvature needs a metric jet of order >= 2")
    if n == 3:
        warnings.warn("trace-free conformal curvature vanishes identically in 3D")
        return TensorJet.zero(3, ("l", "l", "l", "u"), g.order - 2, g.backend)
    if n < 3:
        raise DimensionTooSmall("conformal curvature needs dimension >= 3")
    rm = riemann_lowered(g)
    p = schouten(g)
    comps = {}
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    kn = (
                        p[l, i] * g.component(k, j)
                        - p[l, j] * g.component(k, i)
                        + g.component(l, i) * p[k, j]
                        - g.component(l, j) * p[k, i]
                    )
                    comps[(i, j, k, l)] = rm[i, j, k, l] - kn
    lowered = TensorJet(
        n,
        ("l", "l", "l", "l"),
        comps,
        symmetries=(("antisym", (0, 1)), ("antisym", (2, 3))),
    )
    raised = raise_slot(lowered, inverse_metric(g), 3)
    return TensorJet(
        n,
        ("l", "l", "l", "u"),
        raised.comps,
        symmetries=(("antisym", (0, 1)),),
    )


def covariant_derivative(t: TensorJet, g: MetricJet) -> TensorJet:
    """Levi-Civita covariant derivative; the new slot comes first."""
    n = t.dim
    if n != g.dim:
        raise RankMismatch("tensor and metric dimensions differ")
    if t.order < 1 or g.order < 1:
        raise OrderTooLow("covariant derivative needs order >= 1")
    gamma = christoffel(g)
    comps = {}
    for c in range(n):
        for idx in _indices(n, t.n_slots):
            total = differentiate(t[idx], c)
            for s, var in enumerate(t.variance):
                for m in range(n):
                    src = list(idx)
                    src[s] = m
                    if var == "u":
                        total = total + gamma[idx[s], c, m] * t[tuple(src)]
                    else:
                        total = total - gamma[m, c, idx[s]] * t[tuple(src)]
            comps[(c,) + idx] = total
    return TensorJet(n, ("l",) + t.variance, comps)


def cotton(g: MetricJet) -> TensorJet:
    """C_ijk = cov_i P_jk - cov_j P_ik in three dimensions."""
    if g.dim != 3:
        raise WrongDimension("the (0,3) conformal tensor lives in dimension 3")
    if g.order < 3:
        raise OrderTooLow("cotton needs a metric jet of order >= 3")
    dp = covariant_derivative(schouten(g), g)
    n = 3
    comps = {
        (i, j, k): dp[i, j, k] - dp[j, i, k]
        for i in range(n)
        for j in range(n)
        for k in range(n)
    }
    return TensorJet(n, ("l", "l", "l"), comps, symmetries=(("antisym", (0, 1)),))


# ---------------------------------------------------------------------------
# Contractions, Hodge star, Lie derivative, pullback
# ---------------------------------------------------------------------------


def norm_sq(t: TensorJet, g: MetricJet) -> Jet:
    """Full contraction of t with itself, slots paired by the metric."""
    if t.dim != g.dim:
        raise RankMismatch("tensor and metric dimensions differ")
    ginv = inverse_metric(g)
    flipped = t
    for s, var in enumerate(t.variance):
        flipped = lower_slot(flipped, g, s) if var == "u" else raise_slot(flipped, ginv, s)
    total = Jet.zero(t.dim, min(t.order, flipped.order), t.backend)
    for idx in _indices(t.dim, t.n_slots):
        total = total + t[idx] * flipped[idx]
    return total


def _volume_form(g: MetricJet):
    """sqrt|det g| epsilon_{ijk}; promotes to float when the root is irrational."""
    n = g.dim
    det = None
    for perm in itertools.permutations(range(n)):
        sign = _perm_sign(perm)
        term = g.component(0, perm[0])
        for r in range(1, n):
            term = term * g.component(r, perm[r])
        term = term if sign > 0 else -term
        det = term if det is None else det + term
    if det.value() == 0:
        raise NotInvertibleMetric("metric value matrix is singular")
    if g.backend == "exact" and to_fraction(det.value()) < 0:
        det = -det
    elif g.backend == "float" and det.value() < 0:
        det = -det
    return power(det, Fraction(1, 2))


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _levi_civita(n: int):
    eps = {}
    for perm in itertools.permutations(range(n)):
        eps[perm] = _perm_sign(perm)
    return eps


def hodge_star_2form(omega: TensorJet, g: MetricJet) -> TensorJet:
    """Hodge dual of a 2-form in three dimensions: a 1-form."""
    if g.dim != 3 or omega.dim != 3:
        raise WrongDimension("the 2-form Hodge star is implemented for dimension 3")
    if omega.variance != ("l", "l"):
        raise RankMismatch("expected a (0,2) form")
    ginv = inverse_metric(g)
    raised = raise_slot(raise_slot(omega, ginv, 0), ginv, 1)
    vol = _volume_form(g)
    if vol.backend != raised.backend:
        # sqrt|det g| had no exact root and promoted to float
        raised = raised.map(lambda j: j.to_float())
    eps = _levi_civita(3)
    half = QQ(1, 2) if raised.backend == "exact" else 0.5
    comps = {}
    for k in range(3):
        total = None
        for i in range(3):
            for j in range(3):
                s = eps.get((i, j, k), 0)
                if s:
                    term = raised[i, j] if s > 0 else -raised[i, j]
                    total = term if total is None else total + term
        comps[(k,)] = total * vol * half
    return TensorJet(3, ("l",), comps)


def hodge_star_1form(alpha: TensorJet, g: MetricJet) -> TensorJet:
    """Hodge dual of a 1-form in three dimensions: a 2-form."""
    if g.dim != 3 or alpha.dim != 3:
        raise WrongDimension("the 1-form Hodge star is implemented for dimension 3")
    if alpha.variance != ("l",):
        raise RankMismatch("expected a (0,1) form")
    raised = raise_slot(alpha, inverse_metric(g), 0)
    vol = _volume_form(g)
    if vol.backend != raised.backend:
        raised = raised.map(lambda j: j.to_float())
    eps = _levi_civita(3)
    comps = {}
    for i in range(3):
        for j in range(3):
            total = None
            for k in range(3):
                s = eps.get((k, i, j), 0)
                if s:
                    term = raised[(k,)] if s > 0 else -raised[(k,)]
                    total = term if total is None else total + term
            if total is None:
                total = Jet.zero(3, raised.order, raised.backend)
            comps[(i, j)] = total * vol
    return TensorJet(3, ("l", "l"), comps, symmetries=(("antisym", (0, 1)),))


def lie_derivative_metric(x, g: MetricJet) -> TensorJet:
    """(L_X g)_ij = X^m d_m g_ij + g_mj d_i X^m + g_im d_j X^m."""
    n = g.dim
    comps_x = list(x.comps.values()) if isinstance(x, TensorJet) else list(x)
    if len(comps_x) != n:
        raise RankMismatch("vector field component count differs from dimension")
    if g.order < 1 or any(c.order < 1 for c in comps_x):
        raise OrderTooLow("lie derivative needs order >= 1")
    dx = [[differentiate(comps_x[m], i) for i in range(n)] for m in range(n)]
    comps = {}
    for i in range(n):
        for j in range(i, n):
            total = None
            for m in range(n):
                term = (
                    comps_x[m] * differentiate(g.component(i, j), m)
                    + g.component(m, j) * dx[m][i]
                    + g.component(i, m) * dx[m][j]
                )
                total = term if total is None else total + term
            comps[(i, j)] = comps[(j, i)] = total
    return TensorJet(n, ("l", "l"), comps, symmetries=(("sym", (0, 1)),))


def pullback_metric(phi: DiffeoJet, g: MetricJet) -> MetricJet:
    """(phi^* g)_ij = (g_ab o phi) d_i phi^a d_j phi^b."""
    n = g.dim
    if phi.dim != n:
        raise RankMismatch("diffeo and metric dimensions differ")
    dphi = [[differentiate(phi.comps[a], i) for i in range(n)] for a in range(n)]
    comps = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            total = None
            for a in range(n):
                for b in range(n):
                    term = compose(g.component(a, b), phi.comps) * dphi[a][i] * dphi[b][j]
                    total = term if total is None else total + term
            comps[i][j] = comps[j][i] = total
    return MetricJet.from_components(
        comps, signature=g.signature, basepoint=g.basepoint
    )


def pullback_covariant(phi: DiffeoJet, t: TensorJet) -> TensorJet:
    """Pullback of a fully covariant tensor along a diffeo jet."""
    if any(v != "l" for v in t.variance):
        raise RankMismatch("pullback implemented for fully covariant tensors")
    n = t.dim
    dphi = [[differentiate(phi.comps[a], i) for i in range(n)] for a in range(n)]
    comps = {}
    for idx in _indices(n, t.n_slots):
        total = None
        for src in _indices(n, t.n_slots):
            term = compose(t[src], phi.comps)
            for s in range(t.n_slots):
                term = term * dphi[src[s]][idx[s]]
            total = term if total is None else total + term
        comps[idx] = total
    return TensorJet(n, t.variance, comps)
