"""Univariate polynomials and rational functions over exact rationals.

Used for Poincare-style generating functions, so the feature set is small:
ring arithmetic, division, gcd, canonical reduction, series expansion.
Coefficients are stored densely in ascending degree.
"""

from __future__ import annotations

from .jets import QQ, exact_str


class Poly:
    """Polynomial with exact rational coefficients, ascending order."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [QQ(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @staticmethod
    def constant(c) -> "Poly":
        return Poly([c])

    @staticmethod
    def x() -> "Poly":
        return Poly([0, 1])

    @property
    def degree(self) -> int:
        """Degree, with the convention deg 0 = -1."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, j: int):
        return self.coeffs[j] if 0 <= j < len(self.coeffs) else QQ(0)

    def __eq__(self, other):
        other = other if isinstance(other, Poly) else Poly.constant(other)
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        other = other if isinstance(other, Poly) else Poly.constant(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self[j] + other[j] for j in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other):
        other = other if isinstance(other, Poly) else Poly.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly([c * QQ(other) for c in self.coeffs])
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [QQ(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, m: int):
        out = Poly([1])
        for _ in range(m):
            out = out * self
        return out

    def __divmod__(self, other: "Poly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [QQ(0)] * max(len(rem) - len(other.coeffs) + 1, 0)
        d = other.degree
        lead = other.coeffs[-1]
        while len(rem) - 1 >= d and any(c != 0 for c in rem):
            while rem and rem[-1] == 0:
                rem.pop()
            if len(rem) - 1 < d:
                break
            factor = rem[-1] / lead
            shift = len(rem) - 1 - d
            q[shift] = factor
            for j in range(len(other.coeffs)):
                rem[shift + j] -= factor * other.coeffs[j]
            rem.pop()
        return Poly(q), Poly(rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self * (QQ(1) / self.coeffs[-1])

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def evaluate(self, t):
        acc = QQ(0)
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def to_list(self):
        return [exact_str(c) for c in self.coeffs]

    def __repr__(self):
        if self.is_zero():
            return "Poly<0>"
        terms = []
        for j, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if j == 0:
                terms.append(f"{c}")
            elif j == 1:
                terms.append(f"{c}*z")
            else:
                terms.append(f"{c}*z^{j}")
        return "Poly<" + " + ".join(terms) + ">"


class RatFunc:
    """Reduced rational function num/den, denominator monic."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=Poly([1])):
        num = num if isinstance(num, Poly) else Poly.constant(num)
        den = den if isinstance(den, Poly) else Poly.constant(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        g = num.gcd(den)
        if not g.is_zero() and g.degree > 0:
            num = num // g
            den = den // g
        if not num.is_zero():
            lead = den.coeffs[-1]
            num = num * (QQ(1) / lead)
            den = den * (QQ(1) / lead)
        else:
            den = Poly([1])
        self.num = num
        self.den = den

    def __eq__(self, other):
        other = other if isinstance(other, RatFunc) else RatFunc(other)
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        other = other if isinstance(other, RatFunc) else RatFunc(other)
        return RatFunc(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        other = other if isinstance(other, RatFunc) else RatFunc(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = other if isinstance(other, RatFunc) else RatFunc(other)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = other if isinstance(other, RatFunc) else RatFunc(other)
        return RatFunc(self.num * other.den, self.den * other.num)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def series(self, n_terms: int):
        """First n_terms Taylor coefficients at z = 0 (pole at 0 rejected)."""
        if self.den[0] == 0:
            raise ZeroDivisionError("rational function has a pole at z = 0")
        d0 = self.den[0]
        out = []
        for k in range(n_terms):
            acc = self.num[k]
            for j in range(1, min(k, self.den.degree) + 1):
                acc -= self.den[j] * out[k - j]
            out.append(acc / d0)
        return out

    def to_json_dict(self):
        return {"num": self.num.to_list(), "den": self.den.to_list()}

    def __repr__(self):
        return f"RatFunc<({self.num!r}) / ({self.den!r})>"
