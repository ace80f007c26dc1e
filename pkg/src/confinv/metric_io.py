"""Metric files in, jets and reports out.

A metric is described by a small line-oriented text format (dimension,
signature, coordinate names, jet order, basepoint, upper-triangle
components as expressions) and turned into a ``MetricJet`` by Taylor
expansion at the basepoint.  The expression language is deliberately
tiny: rational arithmetic, integer powers, and exp/sin/cos, whose
Taylor coefficients are rational, so a metric stays on the exact
backend whenever the elementary functions are only evaluated at 0.
Anything else promotes to float with a warning.

The report serializer at the bottom fixes the JSON field names used by
the command-line tools.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from fractions import Fraction as QQ

from .errors import (
    ArityError,
    DivisionByZeroAtBasepoint,
    ParseError,
    SignatureMismatch,
)
from .jets import EXACT, Jet, cos_jet, exp_jet, invert, sin_jet
from .tensors import MetricJet

_FUNCTIONS = ("exp", "sin", "cos")


# ---------------------------------------------------------------------------
# Expression trees and their parser
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Expr:
    """One node of a parsed expression.

    ``op`` is one of: "num" (args = (Fraction,)), "var" (args =
    (coordinate index,)), "add"/"sub"/"mul"/"div" (two children),
    "pow" (child, integer exponent), "neg" (one child), or a function
    name from exp/sin/cos (one child).
    """

    op: str
    args: tuple

    def serialize(self) -> str:
        return _to_text(self, 0)


_PREC = {"add": 1, "sub": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4}


def _to_text(e: Expr, parent_prec: int) -> str:
    if e.op == "num":
        q = e.args[0]
        text = str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
        if q < 0 and parent_prec > 1:
            return f"({text})"
        return text
    if e.op == "var":
        return e.args[1]
    if e.op in _FUNCTIONS:
        return f"{e.op}({_to_text(e.args[0], 0)})"
    prec = _PREC[e.op]
    if e.op == "neg":
        inner = f"-{_to_text(e.args[0], prec)}"
    elif e.op == "pow":
        inner = f"{_to_text(e.args[0], prec + 1)}^{e.args[1]}"
    else:
        sym = {"add": " + ", "sub": " - ", "mul": "*", "div": "/"}[e.op]
        right_prec = prec + 1 if e.op in ("sub", "div") else prec
        inner = f"{_to_text(e.args[0], prec)}{sym}{_to_text(e.args[1], right_prec)}"
    return f"({inner})" if prec < parent_prec else inner


@dataclass
class _Token:
    kind: str  # "int", "ident", "op", "end"
    text: str
    line: int
    column: int


def _tokenize(text: str, line: int, column0: int) -> list:
    tokens = []
    i = 0
    while i < len(text):
        c = text[i]
        col = column0 + i
        if c in " \t":
            i += 1
            continue
        if c.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(_Token("int", text[i:j], line, col))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("ident", text[i:j], line, col))
            i = j
            continue
        if c in "+-*/^()":
            tokens.append(_Token("op", c, line, col))
            i += 1
            continue
        raise ParseError(f"unexpected character {c!r}", line, col)
    tokens.append(_Token("end", "", line, column0 + len(text)))
    return tokens


class _ExprParser:
    """Recursive descent over the grammar

    expr   := term (("+"|"-") term)*
    term   := factor (("*"|"/") factor)*
    factor := base ("^" integer)?
    base   := integer | ident | "(" expr ")" | fn "(" expr ")" | "-" base
    """

    def __init__(self, tokens: list, coords: tuple):
        self.tokens = tokens
        self.pos = 0
        self.coords = coords

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, text: str) -> _Token:
        tok = self.take()
        if tok.kind != "op" or tok.text != text:
            raise ParseError(f"expected {text!r}", tok.line, tok.column)
        return tok

    def parse(self) -> Expr:
        e = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected {tok.text!r}", tok.line, tok.column)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.take().text
            e = Expr("add" if op == "+" else "sub", (e, self.term()))
        return e

    def term(self) -> Expr:
        e = self.factor()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.take().text
            e = Expr("mul" if op == "*" else "div", (e, self.factor()))
        return e

    def factor(self) -> Expr:
        e = self.base()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.take()
            sign = 1
            tok = self.peek()
            if tok.kind == "op" and tok.text == "-":
                self.take()
                sign = -1
                tok = self.peek()
            if tok.kind != "int":
                raise ParseError("exponent must be an integer", tok.line, tok.column)
            self.take()
            e = Expr("pow", (e, sign * int(tok.text)))
        return e

    def base(self) -> Expr:
        tok = self.take()
        if tok.kind == "int":
            return Expr("num", (QQ(int(tok.text)),))
        if tok.kind == "op" and tok.text == "-":
            return Expr("neg", (self.base(),))
        if tok.kind == "op" and tok.text == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        if tok.kind == "ident":
            if tok.text in _FUNCTIONS:
                self.expect_op("(")
                e = self.expr()
                self.expect_op(")")
                return Expr(tok.text, (e,))
            if tok.text in self.coords:
                return Expr("var", (self.coords.index(tok.text), tok.text))
            raise ParseError(f"unknown identifier {tok.text!r}", tok.line, tok.column)
        raise ParseError(
            f"expected a value, got {tok.text!r}" if tok.text else "unexpected end of expression",
            tok.line,
            tok.column,
        )


def parse_expr(text: str, coords, line: int = 1, column0: int = 1) -> Expr:
    """Parse one expression; line/column0 locate it inside a larger file."""
    return _ExprParser(_tokenize(text, line, column0), tuple(coords)).parse()


# ---------------------------------------------------------------------------
# Metric files
# ---------------------------------------------------------------------------


@dataclass
class MetricSpec:
    dim: int
    signature: tuple
    coordinates: tuple
    components: list  # n x n expression strings, symmetric
    basepoint: tuple  # n Fractions
    jet_order: int


def _parse_rational(text: str, line: int, column: int) -> QQ:
    try:
        return QQ(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a rational number: {text.strip()!r}", line, column) from None


def parse_metric(text: str) -> MetricSpec:
    """Parse the line-oriented metric format into a MetricSpec.

    Unknown keys, missing required keys, malformed expressions, and
    duplicate component entries are all reported with line/column
    positions.  Component entries are only required for i <= j; a
    contradictory lower-triangle entry is averaged in with a warning.
    """
    header: dict = {}
    entries: list = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", lineno, len(line))
        key, _, value = line.partition("=")
        stripped = key.strip()
        value_col = len(key) + 2
        if stripped.startswith("g["):
            entries.append((stripped, value.strip(), lineno, value_col))
        elif stripped in ("dim", "signature", "coords", "order", "basepoint"):
            if stripped in header:
                raise ParseError(f"duplicate key {stripped!r}", lineno, 1)
            header[stripped] = (value.strip(), lineno, value_col)
        else:
            raise ParseError(f"unknown key {stripped!r}", lineno, 1)
    for required in ("dim", "coords", "order", "basepoint"):
        if required not in header:
            raise ParseError(f"missing required key {required!r}", len(text.splitlines()) + 1, 1)

    value, lineno, col = header["dim"]
    try:
        n = int(value)
    except ValueError:
        raise ParseError(f"dim must be an integer, got {value!r}", lineno, col) from None
    if n < 1:
        raise ParseError("dim must be positive", lineno, col)

    coords_value, lineno, col = header["coords"]
    coords = tuple(c.strip() for c in coords_value.split(","))
    if len(coords) != n or len(set(coords)) != n or not all(coords):
        raise ArityError(f"coords must list {n} distinct names, got {coords_value!r}")

    if "signature" in header:
        value, lineno, col = header["signature"]
        parts = value.split(",")
        if len(parts) != 2:
            raise ParseError("signature must be 'p,q'", lineno, col)
        try:
            p, q = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"signature must be integers, got {value!r}", lineno, col) from None
        if p + q != n or p < 0 or q < 0:
            raise SignatureMismatch(f"signature ({p},{q}) does not sum to dim {n}")
        signature = (p, q)
    else:
        signature = (n, 0)

    value, lineno, col = header["order"]
    try:
        k = int(value)
    except ValueError:
        raise ParseError(f"order must be an integer, got {value!r}", lineno, col) from None
    if k < 0:
        raise ParseError("order must be >= 0", lineno, col)

    value, lineno, col = header["basepoint"]
    parts = value.split(",")
    if len(parts) != n:
        raise ArityError(f"basepoint must have {n} entries, got {len(parts)}")
    basepoint = tuple(_parse_rational(p, lineno, col) for p in parts)

    comps = [["0"] * n for _ in range(n)]
    seen: set = set()
    for key, expr_text, lineno, col in entries:
        inner = key[1:]
        if not (inner.startswith("[") and inner.endswith("]") and "][" in inner):
            raise ParseError(f"component key must look like g[i][j], got {key!r}", lineno, 1)
        a, _, b = inner[1:-1].partition("][")
        try:
            i, j = int(a), int(b)
        except ValueError:
            raise ParseError(f"component indices must be integers in {key!r}", lineno, 1) from None
        if not (1 <= i <= n and 1 <= j <= n):
            raise ParseError(f"component indices out of range in {key!r}", lineno, 1)
        if (i, j) in seen:
            raise ParseError(f"duplicate component {key}", lineno, 1)
        seen.add((i, j))
        parse_expr(expr_text, coords, lineno, col)  # grammar and identifier check
        i -= 1
        j -= 1
        if i != j and (j + 1, i + 1) in seen and comps[j][i] != expr_text:
            warnings.warn(
                f"g[{j + 1}][{i + 1}] and g[{i + 1}][{j + 1}] differ; averaging",
                stacklevel=2,
            )
            merged = f"(({comps[j][i]}) + ({expr_text}))/2"
            comps[i][j] = comps[j][i] = merged
        else:
            comps[i][j] = comps[j][i] = expr_text
    return MetricSpec(
        dim=n,
        signature=signature,
        coordinates=coords,
        components=comps,
        basepoint=basepoint,
        jet_order=k,
    )


def serialize_metric(spec: MetricSpec) -> str:
    """Canonical text for a MetricSpec; parse(serialize(s)) == s."""
    lines = [
        f"dim = {spec.dim}",
        f"signature = {spec.signature[0]},{spec.signature[1]}",
        "coords = " + ", ".join(spec.coordinates),
        f"order = {spec.jet_order}",
        "basepoint = " + ", ".join(str(b) for b in spec.basepoint),
    ]
    for i in range(spec.dim):
        for j in range(i, spec.dim):
            if spec.components[i][j] != "0":
                lines.append(f"g[{i + 1}][{j + 1}] = {spec.components[i][j]}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Expressions to jets
# ---------------------------------------------------------------------------


def expr_to_jet(e: Expr, basepoint, order: int) -> Jet:
    """Degree-<=order Taylor polynomial of the expression at basepoint.

    Stays exact; exp/sin/cos away from argument value 0 promote to float
    (with a BackendPromotionWarning) because their values are irrational.
    """
    basepoint = tuple(QQ(b) for b in basepoint)
    n = len(basepoint)

    def walk(node: Expr) -> Jet:
        if node.op == "num":
            return Jet.constant(n, order, node.args[0], EXACT)
        if node.op == "var":
            i = node.args[0]
            mono = tuple(1 if t == i else 0 for t in range(n))
            coeffs = {mono: QQ(1)}
            if basepoint[i] != 0:
                coeffs[(0,) * n] = basepoint[i]
            return Jet(n, order, coeffs, EXACT)
        if node.op == "add":
            return walk(node.args[0]) + walk(node.args[1])
        if node.op == "sub":
            return walk(node.args[0]) - walk(node.args[1])
        if node.op == "mul":
            return walk(node.args[0]) * walk(node.args[1])
        if node.op == "neg":
            return -walk(node.args[0])
        if node.op == "div":
            denom = walk(node.args[1])
            if denom.value() == 0:
                raise DivisionByZeroAtBasepoint(
                    "division by an expression vanishing at the basepoint"
                )
            return walk(node.args[0]) * invert(denom)
        if node.op == "pow":
            base, m = walk(node.args[0]), node.args[1]
            if m == 0:
                return Jet.constant(n, order, QQ(1), base.backend)
            if m < 0:
                if base.value() == 0:
                    raise DivisionByZeroAtBasepoint(
                        "negative power of an expression vanishing at the basepoint"
                    )
                base, m = invert(base), -m
            acc = base
            for _ in range(m - 1):
                acc = acc * base
            return acc
        fn = {"exp": exp_jet, "sin": sin_jet, "cos": cos_jet}[node.op]
        return fn(walk(node.args[0]))

    return walk(e)


def build_metric_jet(spec: MetricSpec) -> MetricJet:
    """Expand the component expressions and assemble the MetricJet.

    Raises NotInvertibleMetric / SignatureMismatch when the value matrix
    at the basepoint contradicts the declaration.
    """
    n = spec.dim
    jets = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            e = parse_expr(spec.components[i][j], spec.coordinates)
            jets[i][j] = jets[j][i] = expr_to_jet(e, spec.basepoint, spec.jet_order)
    backends = {jet.backend for row in jets for jet in row}
    if len(backends) > 1:
        jets = [[jet.to_float() for jet in row] for row in jets]
    return MetricJet.from_components(
        jets, signature=spec.signature, basepoint=spec.basepoint
    )


def load_metric(path) -> MetricJet:
    with open(path, encoding="utf-8") as fh:
        return build_metric_jet(parse_metric(fh.read()))


# ---------------------------------------------------------------------------
# Report serialization
# ---------------------------------------------------------------------------


def report_dict(values, residuals, meta: dict) -> dict:
    """Assemble the report object; field names are part of the interface."""
    return {
        "invariants": [
            {
                "name": v.name,
                "order": v.order,
                "backend": v.backend,
                "value": str(v.value) if v.backend == "exact" else float(v.value),
            }
            for v in values
        ],
        "residuals": [{"check": name, "value": float(r)} for name, r in residuals],
        "meta": {
            "dim": meta["dim"],
            "signature": list(meta["signature"]),
            "order": meta["order"],
            "seed": meta.get("seed"),
        },
    }


def report_json(values, residuals, meta: dict) -> str:
    """Deterministic JSON text for a report (stable key order, repr floats)."""
    return json.dumps(report_dict(values, residuals, meta), indent=2) + "\n"
