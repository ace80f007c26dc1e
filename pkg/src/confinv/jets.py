"""Truncated multivariate Taylor arithmetic at a basepoint.

A :class:`Jet` is the degree-<=k Taylor polynomial of a function of n
variables, stored sparsely as a map from exponent multi-indices to
coefficients.  Two scalar backends exist:

* ``exact``  -- arbitrary-precision rationals (gmpy2.mpq when available,
  fractions.Fraction otherwise),
* ``float``  -- machine doubles.

Mixing backends in one operation is an error; the only sanctioned
transitions are the explicit ``to_float`` and the automatic promotion inside
``power``/``exp_jet``/``sin_jet``/``cos_jet`` when the exact result would be
irrational (a :class:`~confinv.errors.BackendPromotionWarning` is emitted and
the result carries ``promoted=True``).

Truncation contract: every binary operation returns the minimum of the
operand orders.  ``monomial_shift`` is the one deliberate exception, because
multiplying by a fixed monomial genuinely raises the known order.

Values are immutable after construction.  All functions here are pure.
"""

from __future__ import annotations

import math
import warnings
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from .errors import (
    ArityMismatch,
    BackendMismatch,
    BackendPromotionWarning,
    DimensionMismatch,
    NonPositiveConstantTerm,
    NonzeroConstantTerm,
    OrderTooLow,
    ZeroConstantTerm,
)

try:
    import gmpy2
    from gmpy2 import mpq as _mpq

    _HAVE_GMPY2 = True
except ImportError:  # pragma: no cover - gmpy2 is an optional accelerator
    _mpq = None
    _HAVE_GMPY2 = False

EXACT = "exact"
FLOAT = "float"

DEFAULT_TOL = 1e-9

_EXACT_TYPES = (int, Fraction) if not _HAVE_GMPY2 else (int, Fraction, type(_mpq(0)))


def QQ(num, den=1):
    """Exact rational constructor (gmpy2-backed when available)."""
    if _HAVE_GMPY2:
        if isinstance(num, Fraction):
            num = _mpq(num.numerator, num.denominator)
        return _mpq(num, den)
    return Fraction(num, den)


def to_fraction(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(x)
    # int() the parts: mpq components are mpz, which must not leak into
    # Fraction internals (mixed Fraction/mpz arithmetic misbehaves).
    return Fraction(int(x.numerator), int(x.denominator))


def exact_str(x) -> str:
    """Serialize an exact rational as 'p' or 'p/q'."""
    n, d = x.numerator, x.denominator
    return str(n) if d == 1 else f"{n}/{d}"


def _int_nth_root(m: int, q: int):
    """Exact integer q-th root of m >= 0, or None."""
    if _HAVE_GMPY2:
        root, is_exact = gmpy2.iroot(gmpy2.mpz(m), q)
        return int(root) if is_exact else None
    if m < 0:
        return None
    if m < 2:
        return m
    x = int(m ** (1.0 / q)) + 2
    while x**q > m:
        x = ((q - 1) * x + m // x ** (q - 1)) // q
    return x if x**q == m else None


def rational_root(c, q: int):
    """Exact q-th root of a positive rational, or None if irrational."""
    rn = _int_nth_root(int(c.numerator), q)
    if rn is None:
        return None
    rd = _int_nth_root(int(c.denominator), q)
    if rd is None:
        return None
    return QQ(rn, rd)


def monomials(dim: int, max_degree: int) -> Iterator[tuple[int, ...]]:
    """All exponent multi-indices of degree <= max_degree, graded lex order.

    The order (by total degree, then lexicographic on the tuple) is the
    canonical enumeration used everywhere in the package: fiber coordinates,
    matrix row/column labels, serialization.
    """
    for degree in range(max_degree + 1):
        yield from _compositions(degree, dim)


def _compositions(degree: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (degree,)
        return
    for head in range(degree + 1):
        for tail in _compositions(degree - head, parts - 1):
            yield (head,) + tail


def monomial_count(dim: int, max_degree: int) -> int:
    return math.comb(dim + max_degree, max_degree)


def _coerce(value, backend: str):
    if backend == FLOAT:
        return float(value)
    if isinstance(value, float):
        raise BackendMismatch("float scalar in exact-backend jet")
    return QQ(value)


class Jet:
    """Degree-<=order Taylor polynomial in ``dim`` variables."""

    __slots__ = ("dim", "order", "backend", "coeffs", "promoted")

    def __init__(
        self,
        dim: int,
        order: int,
        coeffs: Mapping[tuple[int, ...], object] | None = None,
        backend: str = EXACT,
        promoted: bool = False,
    ):
        if dim < 1:
            raise DimensionMismatch(f"jet dimension must be >= 1, got {dim}")
        if order < 0:
            raise OrderTooLow(f"jet order must be >= 0, got {order}")
        if backend not in (EXACT, FLOAT):
            raise BackendMismatch(f"unknown backend {backend!r}")
        stored: dict[tuple[int, ...], object] = {}
        for alpha, value in (coeffs or {}).items():
            alpha = tuple(alpha)
            if len(alpha) != dim:
                raise DimensionMismatch(
                    f"multi-index {alpha} does not match dimension {dim}"
                )
            if any(e < 0 for e in alpha):
                raise DimensionMismatch(f"negative exponent in {alpha}")
            if sum(alpha) > order:
                continue
            value = _coerce(value, backend)
            if value != 0:
                stored[alpha] = value
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "backend", backend)
        object.__setattr__(self, "coeffs", stored)
        object.__setattr__(self, "promoted", promoted)

    def __setattr__(self, name, value):
        raise AttributeError("Jet is immutable")

    # --- constructors ---

    @classmethod
    def _raw(cls, dim, order, coeffs, backend, promoted=False) -> "Jet":
        """Unvalidated constructor for arithmetic-internal results.

        Callers guarantee coefficients are already coerced, nonzero, and
        keyed by in-range multi-indices of degree <= order.
        """
        out = object.__new__(cls)
        object.__setattr__(out, "dim", dim)
        object.__setattr__(out, "order", order)
        object.__setattr__(out, "backend", backend)
        object.__setattr__(out, "coeffs", coeffs)
        object.__setattr__(out, "promoted", promoted)
        return out

    @staticmethod
    def zero(dim: int, order: int, backend: str = EXACT) -> "Jet":
        return Jet(dim, order, {}, backend)

    @staticmethod
    def constant(dim: int, order: int, value, backend: str = EXACT) -> "Jet":
        return Jet(dim, order, {(0,) * dim: value}, backend)

    @staticmethod
    def variable(dim: int, order: int, i: int, backend: str = EXACT) -> "Jet":
        """The coordinate function x_i (0-based), as a jet."""
        if not 0 <= i < dim:
            raise DimensionMismatch(f"coordinate index {i} out of range for dim {dim}")
        if order < 1:
            raise OrderTooLow("a coordinate jet needs order >= 1")
        e = tuple(1 if j == i else 0 for j in range(dim))
        return Jet(dim, order, {e: 1}, backend)

    # --- inspection ---

    def coefficient(self, alpha: Sequence[int]):
        alpha = tuple(alpha)
        if alpha in self.coeffs:
            return self.coeffs[alpha]
        return 0.0 if self.backend == FLOAT else QQ(0)

    def value(self):
        """Constant term (the value at the basepoint)."""
        return self.coefficient((0,) * self.dim)

    def terms(self):
        """Deterministically ordered (multi-index, coefficient) pairs."""
        return sorted(self.coeffs.items(), key=lambda kv: (sum(kv[0]), kv[0]))

    def is_zero(self, tol: float = 0.0) -> bool:
        if self.backend == EXACT:
            return not self.coeffs
        return all(abs(c) <= tol for c in self.coeffs.values())

    def max_abs_coeff(self) -> float:
        return max((abs(float(c)) for c in self.coeffs.values()), default=0.0)

    # --- conversions ---

    def truncate(self, order: int) -> "Jet":
        if order >= self.order:
            return self
        kept = {a: c for a, c in self.coeffs.items() if sum(a) <= order}
        return Jet(self.dim, order, kept, self.backend, self.promoted)

    def to_float(self) -> "Jet":
        if self.backend == FLOAT:
            return self
        return Jet(
            self.dim,
            self.order,
            {a: float(c) for a, c in self.coeffs.items()},
            FLOAT,
            promoted=True,
        )

    # --- arithmetic ---

    def _merge_backend(self, other: "Jet") -> str:
        if self.backend != other.backend:
            raise BackendMismatch(
                f"cannot combine {self.backend} jet with {other.backend} jet"
            )
        return self.backend

    def _check_dim(self, other: "Jet"):
        if self.dim != other.dim:
            raise DimensionMismatch(
                f"jet dimensions differ: {self.dim} vs {other.dim}"
            )

    def __add__(self, other):
        if not isinstance(other, Jet):
            other = Jet.constant(self.dim, self.order, other, self.backend)
        self._check_dim(other)
        backend = self._merge_backend(other)
        order = min(self.order, other.order)
        if order == self.order:
            out = dict(self.coeffs)
        else:
            out = {a: c for a, c in self.coeffs.items() if sum(a) <= order}
        for a, c in other.coeffs.items():
            if sum(a) <= order:
                s = out.get(a, 0) + c
                if s:
                    out[a] = s
                elif a in out:
                    del out[a]
        return Jet._raw(self.dim, order, out, backend, self.promoted or other.promoted)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return Jet._raw(
            self.dim,
            self.order,
            {a: -c for a, c in self.coeffs.items()},
            self.backend,
            self.promoted,
        )

    def __sub__(self, other):
        if not isinstance(other, Jet):
            other = Jet.constant(self.dim, self.order, other, self.backend)
        return self.__add__(-other)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            scalar = _coerce(other, self.backend)
            if scalar == 0:
                return Jet._raw(self.dim, self.order, {}, self.backend, self.promoted)
            return Jet._raw(
                self.dim,
                self.order,
                {a: c * scalar for a, c in self.coeffs.items()},
                self.backend,
                self.promoted,
            )
        self._check_dim(other)
        backend = self._merge_backend(other)
        order = min(self.order, other.order)
        out: dict[tuple[int, ...], object] = {}
        # truncated Cauchy product
        degs_b = [(b, sum(b), cb) for b, cb in other.coeffs.items()]
        for a, ca in self.coeffs.items():
            da = sum(a)
            if da > order:
                continue
            for b, db, cb in degs_b:
                if da + db > order:
                    continue
                key = tuple(x + y for x, y in zip(a, b))
                prod = ca * cb
                if key in out:
                    out[key] += prod
                else:
                    out[key] = prod
        for key in [k for k, v in out.items() if not v]:
            del out[key]
        return Jet._raw(self.dim, order, out, backend, self.promoted or other.promoted)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self.__mul__(invert(other))
        scalar = _coerce(other, self.backend)
        if scalar == 0:
            raise ZeroDivisionError("division of jet by zero scalar")
        if self.backend == EXACT:
            return self.__mul__(QQ(1) / QQ(scalar))
        return self.__mul__(1.0 / scalar)

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return power(self, exponent)
        return power(self, exponent)

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.order == other.order
            and self.backend == other.backend
            and self.coeffs == other.coeffs
        )

    def __hash__(self):  # pragma: no cover - jets are not meant to be keys
        return hash((self.dim, self.order, self.backend, tuple(self.terms())))

    def __repr__(self):
        parts = []
        for alpha, c in self.terms()[:8]:
            mono = "*".join(
                f"x{i + 1}" + (f"^{e}" if e > 1 else "")
                for i, e in enumerate(alpha)
                if e
            )
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        if len(self.coeffs) > 8:
            parts.append("...")
        body = " + ".join(parts) if parts else "0"
        return f"Jet<{self.dim} vars, order {self.order}, {self.backend}: {body}>"


def isclose(a: Jet, b: Jet, tol: float = DEFAULT_TOL) -> bool:
    """Coefficientwise comparison with absolute tolerance (backend-agnostic)."""
    if a.dim != b.dim:
        raise DimensionMismatch("cannot compare jets of different dimensions")
    order = min(a.order, b.order)
    keys = {k for k in a.coeffs if sum(k) <= order}
    keys |= {k for k in b.coeffs if sum(k) <= order}
    return all(
        abs(float(a.coefficient(k)) - float(b.coefficient(k))) <= tol for k in keys
    )


def invert(a: Jet) -> Jet:
    """Multiplicative inverse via the geometric series."""
    c = a.value()
    if c == 0:
        raise ZeroConstantTerm("cannot invert a jet with zero constant term")
    u = a / c - 1  # zero constant term
    acc = Jet.constant(a.dim, a.order, 1, a.backend)
    for _ in range(a.order):
        acc = 1 - u * acc
    return acc / c


def power(a: Jet, r) -> Jet:
    """a**r for rational r, by binomial series.

    Integer exponents work for any invertible jet; fractional exponents
    require a positive constant term.  On the exact backend a fractional
    power whose constant-term root is irrational promotes the result to the
    float backend (with a warning and promoted=True).
    """
    r = Fraction(r)
    if r.denominator == 1:
        m = r.numerator
        if m == 0:
            return Jet.constant(a.dim, a.order, 1, a.backend)
        base = a if m > 0 else invert(a)
        out = base
        for _ in range(abs(m) - 1):
            out = out * base
        return out

    c = a.value()
    if c <= 0:
        raise NonPositiveConstantTerm(
            "fractional power needs a positive constant term"
        )
    backend = a.backend
    if backend == EXACT:
        root = rational_root(c, r.denominator)
        if root is None:
            warnings.warn(
                f"constant term {c} has no exact {r.denominator}-th root; "
                "promoting to float backend",
                BackendPromotionWarning,
                stacklevel=2,
            )
            return power(a.to_float(), r)
        c_r = root ** r.numerator
        one = QQ(1)
        rr = QQ(r.numerator, r.denominator)
    else:
        c_r = float(c) ** float(r)
        one = 1.0
        rr = float(r)

    u = a / c - 1
    # binomial series: sum_j C(r, j) u^j, Horner from the top
    k = a.order
    binom = [one]
    for j in range(1, k + 1):
        if backend == EXACT:
            binom.append(binom[-1] * (rr - (j - 1)) / j)
        else:
            binom.append(binom[-1] * (rr - (j - 1)) / j)
    acc = Jet.constant(a.dim, k, binom[k], backend)
    for j in range(k - 1, -1, -1):
        acc = acc * u + binom[j]
    return acc * c_r


def differentiate(a: Jet, i: int) -> Jet:
    """Formal partial derivative with respect to x_i (0-based); order drops by 1."""
    if a.order < 1:
        raise OrderTooLow("cannot differentiate an order-0 jet")
    if not 0 <= i < a.dim:
        raise DimensionMismatch(f"coordinate index {i} out of range for dim {a.dim}")
    out = {}
    for alpha, c in a.coeffs.items():
        e = alpha[i]
        if e:
            beta = alpha[:i] + (e - 1,) + alpha[i + 1 :]
            out[beta] = c * e
    return Jet(a.dim, a.order - 1, out, a.backend, a.promoted)


def compose(a: Jet, inners: Sequence[Jet]) -> Jet:
    """Substitute inners[i] for the i-th variable of a (truncated Faa di Bruno).

    Every inner jet must have zero constant term, so that the composite's
    coefficients up to the truncation order are determined.
    """
    if len(inners) != a.dim:
        raise ArityMismatch(
            f"outer jet has {a.dim} variables but {len(inners)} inner jets given"
        )
    dim = inners[0].dim
    backend = a.backend
    for f in inners:
        if f.dim != dim:
            raise DimensionMismatch("inner jets must share one dimension")
        if f.backend != backend:
            raise BackendMismatch("inner jets must match the outer backend")
        if f.value() != 0:
            raise NonzeroConstantTerm("inner jets of a composition must vanish at 0")
    order = min([a.order] + [f.order for f in inners])
    inners = [f.truncate(order) for f in inners]
    pow_cache: dict[tuple[int, int], Jet] = {}

    def inner_power(i: int, e: int) -> Jet:
        key = (i, e)
        if key not in pow_cache:
            if e == 1:
                pow_cache[key] = inners[i]
            else:
                pow_cache[key] = inner_power(i, e - 1) * inners[i]
        return pow_cache[key]

    result = Jet.zero(dim, order, backend)
    for alpha, c in sorted(a.coeffs.items()):
        if sum(alpha) > order:
            # inner jets vanish at 0, so this term cannot contribute
            continue
        term = Jet.constant(dim, order, c, backend)
        for i, e in enumerate(alpha):
            if e:
                term = term * inner_power(i, e)
        result = result + term
    return result


def monomial_shift(a: Jet, gamma: Sequence[int], order: int | None = None) -> Jet:
    """Multiply by the monomial x^gamma (exactly known, so the order rises).

    The product of an order-m jet with x^gamma is determined to order
    m + |gamma|; pass ``order`` to truncate lower.
    """
    gamma = tuple(gamma)
    if len(gamma) != a.dim:
        raise DimensionMismatch("shift exponent has wrong length")
    full = a.order + sum(gamma)
    order = full if order is None else min(order, full)
    out = {}
    for alpha, c in a.coeffs.items():
        key = tuple(x + y for x, y in zip(alpha, gamma))
        if sum(key) <= order:
            out[key] = c
    return Jet(a.dim, order, out, a.backend, a.promoted)


def _series_sum(u: Jet, series_coeffs) -> Jet:
    """sum_j series_coeffs[j] * u^j for a jet u with u(0)=0, Horner style."""
    k = u.order
    acc = Jet.constant(u.dim, k, series_coeffs[k], u.backend)
    for j in range(k - 1, -1, -1):
        acc = acc * u + series_coeffs[j]
    return acc


def _exact_or_promote(a: Jet, fn_name: str, float_const) -> Jet | None:
    """Return float version of a (with warning) when a(0) != 0 on exact backend."""
    if a.backend == EXACT:
        warnings.warn(
            f"{fn_name} at a basepoint value {a.value()} != 0 is irrational; "
            "promoting to float backend",
            BackendPromotionWarning,
            stacklevel=3,
        )
        return a.to_float()
    return a


def exp_jet(a: Jet) -> Jet:
    """exp of a jet; exact when a vanishes at the basepoint."""
    c = a.value()
    if c == 0:
        k = a.order
        if a.backend == EXACT:
            coeffs = [QQ(1)]
            for j in range(1, k + 1):
                coeffs.append(coeffs[-1] / j)
        else:
            coeffs = [1.0 / math.factorial(j) for j in range(k + 1)]
        return _series_sum(a, coeffs)
    if a.backend == EXACT:
        a = _exact_or_promote(a, "exp", None)
    u = a - a.value()
    return exp_jet(u) * math.exp(a.value())


def sin_jet(a: Jet) -> Jet:
    c = a.value()
    if c == 0:
        k = a.order
        coeffs = []
        for j in range(k + 1):
            if j % 2 == 0:
                coeffs.append(QQ(0) if a.backend == EXACT else 0.0)
            else:
                sign = -1 if (j // 2) % 2 else 1
                if a.backend == EXACT:
                    coeffs.append(QQ(sign) / math.factorial(j))
                else:
                    coeffs.append(sign / math.factorial(j))
        return _series_sum(a, coeffs)
    if a.backend == EXACT:
        a = _exact_or_promote(a, "sin", None)
    u = a - a.value()
    c = a.value()
    return sin_jet(u) * math.cos(c) + cos_jet(u) * math.sin(c)


def cos_jet(a: Jet) -> Jet:
    c = a.value()
    if c == 0:
        k = a.order
        coeffs = []
        for j in range(k + 1):
            if j % 2 == 1:
                coeffs.append(QQ(0) if a.backend == EXACT else 0.0)
            else:
                sign = -1 if (j // 2) % 2 else 1
                if a.backend == EXACT:
                    coeffs.append(QQ(sign) / math.factorial(j))
                else:
                    coeffs.append(sign / math.factorial(j))
        return _series_sum(a, coeffs)
    if a.backend == EXACT:
        a = _exact_or_promote(a, "cos", None)
    u = a - a.value()
    c = a.value()
    return cos_jet(u) * math.cos(c) - sin_jet(u) * math.sin(c)
