"""Scalar invariants of conformal structures, frames, and derivations.

Pipeline.  A metric jet determines a distinguished trace-free curvature
quantity: the (3,1) trace-free curvature for n >= 4, or the (0,3)
conformal tensor in 3D.  Its squared norm s fixes a preferred metric
g0 = |s|^(1/2) g (resp. |s|^(1/3) g) in the conformal class, with
norm exactly +-1.  The curvature quantity acts as an operator on
2-forms (n >= 4) or, through the Hodge star, on tangent vectors (n = 3);
its spectral data produce scalar invariants, eigen-2-forms give
skew-symmetric operators A_i, and a word operator with simple spectrum
built from the A_i yields a canonical frame.  Frame-level data
(derivations of invariants, structure constants, frame connection
coefficients) then generate the higher-order invariants.

Eigen-quantities are extended from origin data to jets order-by-order
with bordered Newton solves, so every invariant in the pipeline is
jet-valued and can be differentiated.

Locked conventions (measured once on exact inputs, regression-tested):

* ``WEYL_NORM_TRACE_RATIO = 1``: with the pair-basis operator used here,
  Tr(O^2) equals the full norm contraction of the (3,1) curvature,
  identically in the jet variables.
* ``COTTON_YORK_NORM_RATIO = 1/2``: Tr(Y^2) is half the norm of the
  (0,3) tensor.  Hence on normalized input Tr(Y0^2) is the constant
  +-1/2 and the order-3 scalar uses the max|eigenvalue| = 1 gauge
  instead.
* In 4D every two-letter word in the A_i has even eigenvalue
  multiplicities (the operator on 2-forms commutes with the Hodge star
  and A_i^2 = -Id/4 exactly), so the candidate word list ends with a
  generically simple weighted anticommutator sum.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    ConfinvError,
    DegenerateSample,
    DegenerateStructure,
    DimensionTooSmall,
    NonSimpleSpectrum,
    NoSimpleWordOperator,
    NonSplittable,
    NullEigenform,
    OrderTooLow,
    WrongDimension,
    WrongSignature,
)
from .jets import FLOAT, QQ, Jet, differentiate, invert, power, to_fraction
from .tensors import (
    MetricJet,
    TensorJet,
    _perm_sign,
    christoffel,
    cotton,
    inverse_metric,
    lower_slot,
    norm_sq,
    raise_slot,
    weyl,
)

WEYL_NORM_TRACE_RATIO = QQ(1)
COTTON_YORK_NORM_RATIO = QQ(1, 2)
SIMPLICITY_FACTOR = 1e-6
_TINY = 1e-12


def _pairs(n: int):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def _value_matrix(g: MetricJet) -> np.ndarray:
    n = g.dim
    return np.array(
        [[float(g.component(i, j).value()) for j in range(n)] for i in range(n)],
        dtype=float,
    )


def _as_float_metric(g: MetricJet) -> MetricJet:
    if g.backend == FLOAT:
        return g
    n = g.dim
    return MetricJet.from_components(
        [[g.component(i, j).to_float() for j in range(n)] for i in range(n)],
        signature=g.signature,
        basepoint=g.basepoint,
    )


def _match_backends(t: TensorJet, g: MetricJet):
    """Convert the exact side to float when a tensor and metric disagree."""
    if t.backend == g.backend:
        return t, g
    if t.backend == "exact":
        return t.map(lambda j: j.to_float()), g
    return t, _as_float_metric(g)


# ---------------------------------------------------------------------------
# Fundamental tensor and normalization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FundamentalTensor:
    kind: str  # "weyl31" | "cotton03"
    tensor: TensorJet
    s: Jet  # squared norm w.r.t. the input metric
    weight: int  # scaling weight of s under g -> lambda g


def fundamental_tensor(g: MetricJet) -> FundamentalTensor:
    """The distinguished trace-free curvature quantity of the structure."""
    n = g.dim
    if n <= 2:
        raise DimensionTooSmall("no local invariants below dimension 3")
    if n == 3:
        c = cotton(g)
        return FundamentalTensor("cotton03", c, norm_sq(c, g), -3)
    w = weyl(g)
    return FundamentalTensor("weyl31", w, norm_sq(w, g), -2)


@dataclass(frozen=True)
class NormalizedStructure:
    g0: MetricJet
    sign: int
    lam: Jet  # conformal factor, g0 = lam * g
    fundamental: FundamentalTensor


def normalize(g: MetricJet, fund: FundamentalTensor) -> NormalizedStructure:
    """Preferred metric with the fundamental norm equal to the constant +-1.

    lam = |s|^(1/2) for weight -2, |s|^(1/3) for weight -3; the sign of
    s(0) survives as the +-1.  The |s| jet root usually promotes exact
    inputs to the float backend.
    """
    s = fund.s
    s0 = s.value()
    if (g.backend == "exact" and s0 == 0) or (
        g.backend == "float" and abs(s0) < _TINY
    ):
        raise DegenerateStructure("fundamental tensor norm vanishes at basepoint")
    sign = 1 if s0 > 0 else -1
    abs_s = s if sign > 0 else -s
    lam = power(abs_s, Fraction(1, -fund.weight))
    comps = [[g.component(i, j) for j in range(g.dim)] for i in range(g.dim)]
    if lam.backend != g.backend:
        comps = [[c.to_float() for c in row] for row in comps]
    scaled = [[c * lam for c in row] for row in comps]
    g0 = MetricJet.from_components(
        scaled, signature=g.signature, basepoint=g.basepoint
    )
    return NormalizedStructure(g0, sign, lam, fund)


# ---------------------------------------------------------------------------
# Operator on 2-forms and spectral data
# ---------------------------------------------------------------------------


@dataclass
class SpectralData:
    operator: np.ndarray  # matrix in a g0-orthonormal rep (symmetric there)
    eigenvalues: tuple
    eigenvectors: np.ndarray  # columns, orthonormal-rep coordinates
    min_gap: float
    matrix_jet: list  # coordinate-rep jets (square list of lists)
    coord_matrix: np.ndarray  # coordinate-rep origin values
    coord_vectors: np.ndarray  # eigenvector columns in coordinate rep
    exact_matrix: list | None  # Fractions when the input was exact
    basis: np.ndarray  # orthonormal tangent basis columns
    pairs: tuple | None  # 2-form index pairs, None for the 3D operator

    @property
    def spectral_radius(self) -> float:
        return max(abs(z) for z in self.eigenvalues)

    @property
    def is_simple(self) -> bool:
        return self.min_gap > SIMPLICITY_FACTOR * max(self.spectral_radius, _TINY)


def _orthonormal_basis(g: MetricJet) -> np.ndarray:
    """Columns b_t with g(b_s, b_t) = +-delta, positive norms first."""
    gv = _value_matrix(g)
    eigvals, q = np.linalg.eigh(gv)
    order = sorted(range(len(eigvals)), key=lambda t: (eigvals[t] < 0, -abs(eigvals[t])))
    cols = [q[:, t] / math.sqrt(abs(eigvals[t])) for t in order]
    return np.column_stack(cols)


def _sorted_eig(mat: np.ndarray):
    eigvals, eigvecs = np.linalg.eig(mat)
    idx = sorted(range(len(eigvals)), key=lambda t: (eigvals[t].real, eigvals[t].imag))
    eigvals = eigvals[idx]
    eigvecs = eigvecs[:, idx]
    # sign lock: largest-magnitude coordinate made positive (real part)
    for t in range(eigvecs.shape[1]):
        a = int(np.argmax(np.abs(eigvecs[:, t])))
        if eigvecs[a, t].real < 0:
            eigvecs[:, t] = -eigvecs[:, t]
    gap = math.inf
    for a in range(len(eigvals)):
        for b in range(a + 1, len(eigvals)):
            gap = min(gap, abs(eigvals[a] - eigvals[b]))
    return eigvals, eigvecs, gap


def lambda2_operator(g: MetricJet, fund: FundamentalTensor) -> list:
    """Jets of the curvature operator on 2-forms, pair basis, coordinate rep."""
    if fund.kind != "weyl31":
        raise WrongDimension("the 2-form operator needs the (3,1) curvature")
    n = g.dim
    w, g = _match_backends(fund.tensor, g)
    ginv = inverse_metric(g)
    low = lower_slot(w, g, 3)
    prs = _pairs(n)
    rows = []
    for (i, j) in prs:
        row = []
        for (m, nn) in prs:
            tot = None
            for k in range(n):
                for l in range(n):
                    coeff = ginv[k, m] * ginv[l, nn] - ginv[k, nn] * ginv[l, m]
                    term = low[i, j, k, l] * coeff
                    tot = term if tot is None else tot + term
            row.append(tot)
        rows.append(row)
    return rows


def weyl_operator(g0: MetricJet, fund: FundamentalTensor) -> SpectralData:
    """Spectral data of the curvature operator on 2-forms (n >= 4)."""
    n = g0.dim
    if n < 4:
        raise WrongDimension("the 2-form operator route needs dimension >= 4")
    mat = lambda2_operator(g0, fund)
    prs = _pairs(n)
    nn = len(prs)
    coord = np.array(
        [[float(mat[a][b].value()) for b in range(nn)] for a in range(nn)]
    )
    exact = None
    if mat[0][0].backend == "exact":
        exact = [[to_fraction(mat[a][b].value()) for b in range(nn)] for a in range(nn)]
    if np.max(np.abs(coord)) < _TINY:
        raise DegenerateStructure("curvature operator vanishes at basepoint")
    # orthonormal representation: 2-form components transform covariantly,
    # v_on = C^T v_coord, so the operator conjugates by C^T; symmetric
    # there up to signature signs
    basis = _orthonormal_basis(g0)
    change_t = _pair_change(basis, prs).T
    op_on = change_t @ coord @ np.linalg.inv(change_t)
    eigvals, eigvecs, gap = _sorted_eig(coord)
    return SpectralData(
        operator=op_on,
        eigenvalues=tuple(eigvals),
        eigenvectors=change_t @ eigvecs,
        min_gap=gap,
        matrix_jet=mat,
        coord_matrix=coord,
        coord_vectors=eigvecs,
        exact_matrix=exact,
        basis=basis,
        pairs=tuple(prs),
    )


def _pair_change(basis, prs):
    """C[B, A]: lower pair components of the A-th basis 2-vector pair."""
    nn = len(prs)
    t = np.zeros((nn, nn))
    for B, (i, j) in enumerate(prs):
        for A, (a, b) in enumerate(prs):
            t[B, A] = basis[i, a] * basis[j, b] - basis[j, a] * basis[i, b]
    return t


# ---------------------------------------------------------------------------
# Trace invariants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TraceInvariants:
    hat: dict  # i -> Tr(O^i)/|s0|^(i/2), floats, i = 2..d+1
    rational: dict  # (i, j) -> exact Tr(O^i)Tr(O^j)/s0^((i+j)/2), i+j even


def trace_invariants(spec: SpectralData, s: Jet) -> TraceInvariants:
    """Normalized operator traces; exact pair ratios when the input was exact."""
    s0 = s.value()
    if s0 == 0 or (isinstance(s0, float) and abs(s0) < _TINY):
        raise DegenerateStructure("vanishing norm; traces cannot be normalized")
    nn = len(spec.eigenvalues)
    d = nn - 2
    hat = {}
    for i in range(2, d + 2):
        tr = sum(z**i for z in spec.eigenvalues).real
        hat[i] = tr / abs(float(s0)) ** (i / 2.0)
    rational = {}
    if spec.exact_matrix is not None and s.backend == "exact":
        s0q = to_fraction(s0)
        traces = {}
        acc = [row[:] for row in spec.exact_matrix]
        for i in range(2, d + 2):
            acc = _frac_matmul(acc, spec.exact_matrix)
            traces[i] = sum(acc[t][t] for t in range(nn))
        for i in range(2, d + 2):
            for j in range(i, d + 2):
                if (i + j) % 2 == 0:
                    rational[(i, j)] = traces[i] * traces[j] / s0q ** ((i + j) // 2)
    return TraceInvariants(hat=hat, rational=rational)


def _frac_matmul(a, b):
    n = len(a)
    return [
        [sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)]
        for i in range(n)
    ]


# ---------------------------------------------------------------------------
# Jet-valued eigendata: bordered Newton extension
# ---------------------------------------------------------------------------


def _jet_eigenpair(mat: list, lam0: float, v0: np.ndarray):
    """Extend a simple eigenpair of a jet matrix to jets, order by order.

    Unknowns are normalized by <v0, v> = 1; each degree is fixed by one
    solve against the constant bordered matrix [[M0 - lam0, -v0], [v0, 0]].
    """
    nn = len(mat)
    sample = mat[0][0]
    dim, order = sample.dim, sample.order
    m0 = np.array([[float(mat[r][c].value()) for c in range(nn)] for r in range(nn)])
    bordered = np.zeros((nn + 1, nn + 1))
    bordered[:nn, :nn] = m0 - lam0 * np.eye(nn)
    bordered[:nn, nn] = -v0
    bordered[nn, :nn] = v0
    lam = Jet.constant(dim, order, float(lam0), FLOAT)
    v = [Jet.constant(dim, order, float(v0[t]), FLOAT) for t in range(nn)]
    for _ in range(order):
        residual = []
        for r in range(nn):
            acc = -(lam * v[r])
            for c in range(nn):
                if not mat[r][c].is_zero():
                    acc = acc + mat[r][c] * v[c]
            residual.append(acc)
        nrm = Jet.constant(dim, order, -1.0, FLOAT)
        for t in range(nn):
            nrm = nrm + v[t] * float(v0[t])
        alphas = sorted(
            {a for jet in residual + [nrm] for a in jet.coeffs if sum(a) >= 1}
        )
        if not alphas:
            break
        rhs = np.array(
            [[-float(residual[r].coefficient(a)) for a in alphas] for r in range(nn)]
            + [[-float(nrm.coefficient(a)) for a in alphas]]
        )
        corr = np.linalg.solve(bordered, rhs)
        for t in range(nn):
            delta = {a: corr[t, s] for s, a in enumerate(alphas) if corr[t, s] != 0.0}
            if delta:
                v[t] = v[t] + Jet(dim, order, delta, FLOAT)
        delta = {a: corr[nn, s] for s, a in enumerate(alphas) if corr[nn, s] != 0.0}
        if delta:
            lam = lam + Jet(dim, order, delta, FLOAT)
    return lam, v


def _float_matrix_jet(mat: list) -> list:
    return [[entry.to_float() for entry in row] for row in mat]


# ---------------------------------------------------------------------------
# Eigen-operators A_i and word operators
# ---------------------------------------------------------------------------


@dataclass
class EigenOperator:
    index: int
    eigenvalue: Jet  # jet-extended eigenvalue
    sigma: TensorJet  # normalized eigen-2-form, (0,2), norm +-1
    operator: TensorJet  # (1,1) operator g0^{-1} sigma
    norm_sign: int

    @property
    def value(self) -> np.ndarray:
        n = self.operator.dim
        return np.array(
            [[float(self.operator[i, j].value()) for j in range(n)] for i in range(n)]
        )


def eigen_operators(spec: SpectralData, g0: MetricJet, count: int | None = None) -> list:
    """Skew operators from the first d eigen-2-forms, g0-normalized.

    The default count d = N - 2 matches the exported family; pass an
    explicit count (up to N) when downstream constructions need more.
    """
    if spec.pairs is None:
        raise WrongDimension("eigen-operators need the 2-form operator data")
    if not spec.is_simple:
        raise NonSimpleSpectrum(
            f"eigenvalue gap {spec.min_gap:.3e} below the simplicity threshold"
        )
    rad = max(spec.spectral_radius, _TINY)
    for z in spec.eigenvalues:
        if abs(z.imag) > 1e-9 * rad:
            raise NonSimpleSpectrum("complex eigenvalues; real spectrum required")
    n = g0.dim
    nn = len(spec.pairs)
    d = nn - 2 if count is None else count
    mat = _float_matrix_jet(spec.matrix_jet)
    g0f = _as_float_metric(g0)
    ginv = inverse_metric(g0f)
    ops = []
    for t in range(d):
        lam0 = float(spec.eigenvalues[t].real)
        v0 = spec.coord_vectors[:, t].real.astype(float)
        v0 = v0 / np.linalg.norm(v0)
        lam_jet, v_jets = _jet_eigenpair(mat, lam0, v0)
        comps = {}
        zero = Jet.zero(n, sample_order(v_jets), FLOAT)
        for i in range(n):
            comps[(i, i)] = zero
        for a, (i, j) in enumerate(spec.pairs):
            comps[(i, j)] = v_jets[a]
            comps[(j, i)] = -v_jets[a]
        sigma = TensorJet(n, ("l", "l"), comps, symmetries=(("antisym", (0, 1)),))
        q = norm_sq(sigma, g0f)
        q0 = q.value()
        if abs(q0) < 1e-9 * (1.0 + float(np.linalg.norm(v0)) ** 2):
            raise NullEigenform(f"eigen-2-form {t} has vanishing norm")
        sign = 1 if q0 > 0 else -1
        scale = power(q * sign, Fraction(-1, 2))
        sigma = sigma.map(lambda jet: jet * scale)
        a_op = raise_slot(sigma, ginv, 0)
        ops.append(
            EigenOperator(
                index=t,
                eigenvalue=lam_jet,
                sigma=sigma,
                operator=a_op,
                norm_sign=sign,
            )
        )
    return ops


def sample_order(jets) -> int:
    return jets[0].order


def _mat_from_tensor(t: TensorJet) -> list:
    n = t.dim
    return [[t[i, j] for j in range(n)] for i in range(n)]


def _matmul_jets(a: list, b: list) -> list:
    n = len(a)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = None
            for k in range(n):
                term = a[i][k] * b[k][j]
                acc = term if acc is None else acc + term
            row.append(acc)
        out.append(row)
    return out


def _mat_add(a: list, b: list, ca=1.0, cb=1.0) -> list:
    n = len(a)
    return [
        [a[i][j] * ca + b[i][j] * cb for j in range(n)] for i in range(n)
    ]


def _word_candidates(a_mats: list):
    """Fixed scan order of word combinations.

    Every candidate maps to +-itself when any single A_i changes sign
    (each letter appears with uniform parity), so the eigenvector set,
    hence the frame, is insensitive to the eigen-2-form sign ambiguity.
    Words of odd length are metric-skew and fail the real-spectrum gate
    on their own; they are kept because the scan order is part of the
    published interface.
    """
    d = len(a_mats)
    yield "A1^2", _matmul_jets(a_mats[0], a_mats[0])
    if d >= 2:
        yield "A1A2+A2A1", _mat_add(
            _matmul_jets(a_mats[0], a_mats[1]), _matmul_jets(a_mats[1], a_mats[0])
        )
        yield "A2^2", _matmul_jets(a_mats[1], a_mats[1])
        yield "A1A2A1", _matmul_jets(_matmul_jets(a_mats[0], a_mats[1]), a_mats[0])
    for i in range(2, d):
        yield f"A1A{i + 1}+A{i + 1}A1", _mat_add(
            _matmul_jets(a_mats[0], a_mats[i]), _matmul_jets(a_mats[i], a_mats[0])
        )


@dataclass
class CanonicalFrame:
    vectors: tuple  # e_j as tuples of component jets
    provenance: str  # general-word | quaternionic-4d | cotton-york-3d
    word: str | None
    norm_signs: tuple

    @property
    def dim(self) -> int:
        return len(self.vectors)

    @property
    def order(self) -> int:
        return self.vectors[0][0].order

    def matrix(self) -> np.ndarray:
        n = self.dim
        return np.array(
            [[float(self.vectors[j][m].value()) for j in range(n)] for m in range(n)]
        )


def _normalize_frame_vector(comps: list, g0: MetricJet):
    n = g0.dim
    q = None
    for a in range(n):
        for b in range(n):
            term = g0.component(a, b) * comps[a] * comps[b]
            q = term if q is None else q + term
    q0 = q.value()
    if abs(q0) < 1e-9:
        raise NullEigenform("frame vector is null for the normalized metric")
    sign = 1 if q0 > 0 else -1
    scale = power(q * sign, Fraction(-1, 2))
    comps = [c * scale for c in comps]
    values = [float(c.value()) for c in comps]
    a = max(range(n), key=lambda t: abs(values[t]))
    if values[a] < 0:
        comps = [-c for c in comps]
    return comps, sign


def canonical_frame(g0: MetricJet, ops: list) -> CanonicalFrame:
    """Scan the word candidates for a simple spectrum; frame from eigen-jets."""
    n = g0.dim
    g0f = _as_float_metric(g0)
    a_mats = [_mat_from_tensor(op.operator) for op in ops]
    letter_rad = max(
        max(abs(z) for z in np.linalg.eigvals(op.value)) for op in ops
    )
    # words cancelling below this scale are roundoff artifacts, not operators
    zero_floor = max(_TINY, 1e-6 * letter_rad**2)
    for name, word in _word_candidates(a_mats):
        values = np.array(
            [[float(word[i][j].value()) for j in range(n)] for i in range(n)]
        )
        eigvals, _, gap = _sorted_eig(values)
        rad = max(abs(z) for z in eigvals)
        if rad < zero_floor or gap <= SIMPLICITY_FACTOR * rad:
            continue
        if max(abs(z.imag) for z in eigvals) > 1e-9 * rad:
            continue
        vectors = []
        signs = []
        try:
            for t in range(n):
                lam0 = float(eigvals[t].real)
                _, vecs, _ = _sorted_eig(values)
                v0 = vecs[:, t].real.astype(float)
                v0 = v0 / np.linalg.norm(v0)
                _, v_jets = _jet_eigenpair(word, lam0, v0)
                comps, sign = _normalize_frame_vector(v_jets, g0f)
                vectors.append(tuple(comps))
                signs.append(sign)
        except NullEigenform:
            continue
        frame = CanonicalFrame(
            vectors=tuple(vectors),
            provenance="general-word",
            word=name,
            norm_signs=tuple(signs),
        )
        if abs(np.linalg.det(frame.matrix())) < 1e-9:
            continue
        return frame
    raise NoSimpleWordOperator(
        "no candidate word operator has a simple real spectrum"
    )


# ---------------------------------------------------------------------------
# Word traces
# ---------------------------------------------------------------------------

DEFAULT_WORDS = ((0, 1), (0, 2), (1, 2), (0, 1, 2))


def word_traces(ops: list, words=DEFAULT_WORDS) -> dict:
    """Real parts of Tr(A_{w1} A_{w2} ...) for each index word."""
    if not words:
        raise ValueError("word list must be nonempty")
    out = {}
    for word in words:
        if any(t >= len(ops) for t in word):
            continue
        acc = ops[word[0]].value
        for t in word[1:]:
            acc = acc @ ops[t].value
        out["word_" + "".join(str(t + 1) for t in word)] = float(np.trace(acc).real)
    return out


# ---------------------------------------------------------------------------
# 3D: Cotton-York operator and frame
# ---------------------------------------------------------------------------


def cotton_york(g0: MetricJet, fund: FundamentalTensor) -> SpectralData:
    """(1,1) operator from the (0,3) tensor via the 3D Hodge star."""
    if g0.dim != 3:
        raise WrongDimension("the Hodge-star operator route is three-dimensional")
    if fund.kind != "cotton03":
        raise WrongDimension("expected the (0,3) conformal tensor")
    n = 3
    c = fund.tensor
    ginv = inverse_metric(g0)
    det = None
    for perm in itertools.permutations(range(n)):
        sgn = _perm_sign(perm)
        term = g0.component(0, perm[0])
        for r in range(1, n):
            term = term * g0.component(r, perm[r])
        term = term if sgn > 0 else -term
        det = term if det is None else det + term
    if g0.backend == "exact":
        negative = to_fraction(det.value()) < 0
    else:
        negative = det.value() < 0
    vol = power(-det if negative else det, Fraction(1, 2))
    comps = {}
    half = 0.5 if vol.backend == "float" else QQ(1, 2)
    gi = ginv if vol.backend == ginv[0, 0].backend else TensorJet(
        n, ("u", "u"), {k: v.to_float() for k, v in ginv.comps.items()}
    )
    cc = c if vol.backend == c[0, 0, 0].backend else c.map(lambda j: j.to_float())
    for i in range(n):
        for j in range(n):
            tot = None
            for m in range(n):
                for perm in itertools.permutations(range(n)):
                    if perm[0] != m:
                        continue
                    a, b = perm[1], perm[2]
                    sgn = _perm_sign(perm)
                    for k in range(n):
                        for l in range(n):
                            term = (
                                gi[i, m]
                                * gi[a, k]
                                * gi[b, l]
                                * cc[k, l, j]
                                * (half if sgn > 0 else -half)
                            )
                            tot = term if tot is None else tot + term
            comps[(i, j)] = tot * vol
    mat = [[comps[(i, j)] for j in range(n)] for i in range(n)]
    coord = np.array(
        [[float(mat[i][j].value()) for j in range(n)] for i in range(n)]
    )
    if np.max(np.abs(coord)) < _TINY:
        raise DegenerateStructure("Hodge-star operator vanishes at basepoint")
    basis = _orthonormal_basis(g0)
    op_on = np.linalg.solve(basis, coord @ basis)
    eigvals, eigvecs, gap = _sorted_eig(coord)
    exact = None
    if mat[0][0].backend == "exact":
        exact = [[to_fraction(mat[i][j].value()) for j in range(n)] for i in range(n)]
    return SpectralData(
        operator=op_on,
        eigenvalues=tuple(eigvals),
        eigenvectors=eigvecs,
        min_gap=gap,
        matrix_jet=mat,
        coord_matrix=coord,
        coord_vectors=eigvecs,
        exact_matrix=exact,
        basis=basis,
        pairs=None,
    )


def cotton_york_scalar(spec: SpectralData) -> Jet:
    """The order-3 scalar: Tr(Y^2)/lambda_sel^2, max-|eigenvalue| gauge.

    lambda_sel is the eigenvalue of largest magnitude, extended to a jet,
    so the result is differentiable.  Equals 1/2 of the norm ratio under
    the +-1 normalization, and varies along the moduli of spectra.
    """
    if not spec.is_simple:
        raise NonSimpleSpectrum("spectral gauge needs a simple spectrum")
    mat = _float_matrix_jet(spec.matrix_jet)
    sel = max(range(len(spec.eigenvalues)), key=lambda t: abs(spec.eigenvalues[t]))
    v0 = spec.coord_vectors[:, sel].real.astype(float)
    v0 = v0 / np.linalg.norm(v0)
    lam_jet, _ = _jet_eigenpair(mat, float(spec.eigenvalues[sel].real), v0)
    sq = _matmul_jets(mat, mat)
    tr = None
    for t in range(len(mat)):
        tr = sq[t][t] if tr is None else tr + sq[t][t]
    return tr * invert(lam_jet * lam_jet)


def cotton_york_frame(g0: MetricJet, spec: SpectralData) -> CanonicalFrame:
    """Frame from the jet eigenvectors of the 3D (1,1) operator."""
    if not spec.is_simple:
        raise NonSimpleSpectrum("frame extraction needs a simple spectrum")
    n = 3
    g0f = _as_float_metric(g0)
    mat = _float_matrix_jet(spec.matrix_jet)
    vectors = []
    signs = []
    for t in range(n):
        lam0 = float(spec.eigenvalues[t].real)
        v0 = spec.coord_vectors[:, t].real.astype(float)
        v0 = v0 / np.linalg.norm(v0)
        _, v_jets = _jet_eigenpair(mat, lam0, v0)
        comps, sign = _normalize_frame_vector(v_jets, g0f)
        vectors.append(tuple(comps))
        signs.append(sign)
    return CanonicalFrame(
        vectors=tuple(vectors),
        provenance="cotton-york-3d",
        word=None,
        norm_signs=tuple(signs),
    )


# ---------------------------------------------------------------------------
# 4D quaternionic route
# ---------------------------------------------------------------------------


def _jet_kernel_direction(rows: list, v0: np.ndarray):
    """Extend a simple kernel line of a stacked jet matrix to jets.

    ``rows`` is a list of r x n jet rows with a one-dimensional joint
    kernel at the origin spanned by v0; the extension keeps <v0, v> = 1
    and solves the (consistent) overdetermined system degree by degree
    in the least-squares sense.
    """
    r = len(rows)
    n = len(rows[0])
    sample = rows[0][0]
    dim, order = sample.dim, sample.order
    m0 = np.array(
        [[float(rows[a][b].value()) for b in range(n)] for a in range(r)]
    )
    bordered = np.vstack([m0, v0[np.newaxis, :]])
    v = [Jet.constant(dim, order, float(v0[t]), FLOAT) for t in range(n)]
    for _ in range(order):
        residual = []
        for a in range(r):
            acc = None
            for b in range(n):
                if not rows[a][b].is_zero():
                    term = rows[a][b] * v[b]
                    acc = term if acc is None else acc + term
            residual.append(acc if acc is not None else Jet.zero(dim, order, FLOAT))
        nrm = Jet.constant(dim, order, -1.0, FLOAT)
        for t in range(n):
            nrm = nrm + v[t] * float(v0[t])
        alphas = sorted(
            {a for jet in residual + [nrm] for a in jet.coeffs if sum(a) >= 1}
        )
        if not alphas:
            break
        rhs = np.array(
            [[-float(residual[a].coefficient(al)) for al in alphas] for a in range(r)]
            + [[-float(nrm.coefficient(al)) for al in alphas]]
        )
        corr, *_ = np.linalg.lstsq(bordered, rhs, rcond=None)
        for t in range(n):
            delta = {
                al: corr[t, s] for s, al in enumerate(alphas) if corr[t, s] != 0.0
            }
            if delta:
                v[t] = v[t] + Jet(dim, order, delta, FLOAT)
    return v


def quaternionic_frame_4d(
    g0: MetricJet, spec: SpectralData, ops: list | None = None
) -> CanonicalFrame:
    """Frame from intersections of the +-eigenplanes of B_i = J^L_i J^R_i.

    With ``ops`` (all six jet eigen-operators) the frame vectors are
    jet-extended along the kernel lines; otherwise they are origin-level
    constants.
    """
    if spec.pairs is None or len(spec.pairs) != 6 or g0.dim != 4:
        raise WrongDimension("quaternionic splitting needs dimension 4")
    if g0.signature != (4, 0):
        raise WrongSignature("quaternionic splitting needs Riemannian signature")
    gv = _value_matrix(g0)
    giv = np.linalg.inv(gv)
    vol = math.sqrt(np.linalg.det(gv))
    prs = spec.pairs
    nn = 6
    eps4 = {p: _perm_sign(p) for p in itertools.permutations(range(4))}
    star = np.zeros((nn, nn))
    for A, (i, j) in enumerate(prs):
        for B, (m, q) in enumerate(prs):
            tot = 0.0
            for a in range(4):
                for b in range(4):
                    s = eps4.get((i, j, a, b), 0)
                    if s:
                        tot += 0.5 * vol * s * (
                            giv[a][m] * giv[b][q] - giv[a][q] * giv[b][m]
                        )
            star[A, B] = tot
    if ops is not None and len(ops) < 6:
        raise WrongDimension("jet extension needs all six eigen-operators")
    left, right = [], []
    for t in range(nn):
        v = spec.coord_vectors[:, t].real.astype(float)
        duality = float(v @ star @ v) / float(v @ v)
        if abs(abs(duality) - 1.0) > 1e-6:
            raise NonSplittable(
                f"eigen-2-form {t} mixes dualities (pairing {duality:.3e})"
            )
        if ops is not None:
            jmat = [
                [ops[t].operator[i, j] * 2.0 for j in range(4)] for i in range(4)
            ]
        else:
            sig = np.zeros((4, 4))
            for a, (i, j) in enumerate(prs):
                sig[i, j] = v[a]
                sig[j, i] = -v[a]
            nrm2 = float(np.einsum("ij,ik,jl,kl->", sig, giv, giv, sig))
            if abs(nrm2) < 1e-9:
                raise NullEigenform("null eigen-2-form in the quaternionic route")
            jmat = 2.0 * giv @ (sig / math.sqrt(abs(nrm2)))
        (left if duality > 0 else right).append(
            (float(spec.eigenvalues[t].real), jmat)
        )
    if len(left) != 3 or len(right) != 3:
        raise NonSplittable("duality split is not 3 + 3")
    js_left = [j for _, j in sorted(left, key=lambda p: p[0])]
    js_right = [j for _, j in sorted(right, key=lambda p: p[0])]

    def value_of(j):
        if isinstance(j, np.ndarray):
            return j
        return np.array([[float(j[a][b].value()) for b in range(4)] for a in range(4)])

    def matmul(a, b):
        if isinstance(a, np.ndarray):
            return a @ b
        return _matmul_jets(a, b)

    for js in (js_left, js_right):
        for j in js:
            jv = value_of(j)
            if np.max(np.abs(jv @ jv + np.eye(4))) > 1e-8:
                raise NonSplittable("eigenform operator is not a complex structure")
        # canonicalize the triple: J3 := J1 J2 fixes the quaternion sign
        js[2] = matmul(js[0], js[1])
    b_ops = [matmul(js_left[t], js_right[t]) for t in range(3)]
    b_vals = [value_of(b) for b in b_ops]
    for b in b_vals:
        eig = np.sort(np.linalg.eigvals(b).real)
        if np.max(np.abs(eig - np.array([-1.0, -1.0, 1.0, 1.0]))) > 1e-8:
            raise NonSplittable("B operator spectrum is not {1,1,-1,-1}")
    vectors = []
    signs = []
    g0f = _as_float_metric(g0)
    order = g0f.order
    for s1, s2 in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
        stacked = np.vstack([b_vals[0] - s1 * np.eye(4), b_vals[1] - s2 * np.eye(4)])
        _, sv, vt = np.linalg.svd(stacked)
        if sv[-1] > 1e-8 or sv[-2] < 1e-6:
            raise NonSplittable(
                f"plane intersection ({s1:+d},{s2:+d}) is not a line"
            )
        direction = vt[-1]
        if ops is not None:
            eye = [
                [Jet.constant(4, order, 1.0 if a == b else 0.0, FLOAT) for b in range(4)]
                for a in range(4)
            ]
            rows = []
            for b_jet, s in ((b_ops[0], s1), (b_ops[1], s2)):
                for a in range(4):
                    rows.append(
                        [b_jet[a][c] - eye[a][c] * float(s) for c in range(4)]
                    )
            comps = _jet_kernel_direction(rows, direction.astype(float))
        else:
            comps = [
                Jet.constant(4, order, float(direction[m]), FLOAT) for m in range(4)
            ]
        comps, sign = _normalize_frame_vector(comps, g0f)
        vectors.append(tuple(comps))
        signs.append(sign)
    return CanonicalFrame(
        vectors=tuple(vectors),
        provenance="quaternionic-4d",
        word=None,
        norm_signs=tuple(signs),
    )


# ---------------------------------------------------------------------------
# Frame-level invariants
# ---------------------------------------------------------------------------


def invariant_derivation(frame: CanonicalFrame, inv: Jet) -> list:
    """Directional derivatives of a jet invariant along the frame, at origin."""
    if inv.order < 1:
        raise OrderTooLow("derivations need a jet of order >= 1")
    n = frame.dim
    grads = [float(differentiate(inv, m).value()) for m in range(n)]
    out = []
    for j in range(n):
        out.append(
            sum(float(frame.vectors[j][m].value()) * grads[m] for m in range(n))
        )
    return out


def structure_constants(frame: CanonicalFrame) -> np.ndarray:
    """c[k, i, j] with [e_i, e_j] = sum_k c[k,i,j] e_k at the origin."""
    if frame.order < 1:
        raise OrderTooLow("structure constants need frame jets of order >= 1")
    n = frame.dim
    fmat = frame.matrix()
    values = np.array(
        [[float(frame.vectors[j][m].value()) for m in range(n)] for j in range(n)]
    )
    grads = [
        [
            [float(differentiate(frame.vectors[j][m], a).value()) for a in range(n)]
            for m in range(n)
        ]
        for j in range(n)
    ]
    c = np.zeros((n, n, n))
    for i in range(n):
        for j in range(i + 1, n):
            bracket = np.array(
                [
                    sum(
                        values[i][a] * grads[j][m][a] - values[j][a] * grads[i][m][a]
                        for a in range(n)
                    )
                    for m in range(n)
                ]
            )
            coeffs = np.linalg.solve(fmat, bracket)
            c[:, i, j] = coeffs
            c[:, j, i] = -coeffs
    return c


def frame_christoffel(g0: MetricJet, frame: CanonicalFrame) -> np.ndarray:
    """Connection coefficients of g0's Levi-Civita connection in the frame."""
    if frame.order < 1 or g0.order < 1:
        raise OrderTooLow("frame connection needs order >= 1")
    n = frame.dim
    g0f = _as_float_metric(g0)
    gam = christoffel(g0f)
    gval = np.array(
        [
            [[float(gam[m, a, b].value()) for b in range(n)] for a in range(n)]
            for m in range(n)
        ]
    )
    fmat = frame.matrix()
    values = np.array(
        [[float(frame.vectors[j][m].value()) for m in range(n)] for j in range(n)]
    )
    grads = [
        [
            [float(differentiate(frame.vectors[j][m], a).value()) for a in range(n)]
            for m in range(n)
        ]
        for j in range(n)
    ]
    out = np.zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            cov = np.array(
                [
                    sum(
                        values[i][a]
                        * (
                            grads[j][m][a]
                            + sum(gval[m][a][b] * values[j][b] for b in range(n))
                        )
                        for a in range(n)
                    )
                    for m in range(n)
                ]
            )
            out[:, i, j] = np.linalg.solve(fmat, cov)
    return out


def symmetric_connection_values(gamma: np.ndarray) -> list:
    """The n*n(n+1)/2 independent symmetrized values Gamma^k_(ij), i <= j."""
    n = gamma.shape[0]
    vals = []
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                vals.append(0.5 * (gamma[k, i, j] + gamma[k, j, i]))
    return vals


# ---------------------------------------------------------------------------
# Full pipeline: exported invariants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InvariantValue:
    name: str
    order: int
    backend: str
    value: object


def _frame_order_ok(frame_needed, g, n):
    min_order = 3 if n >= 4 else 4
    return g.order >= min_order if frame_needed else True


def _rescaled_spectral(spec: SpectralData, lam: Jet, g0: MetricJet) -> SpectralData:
    """Spectral data of the operator of lam*g from that of g.

    The 2-form operator scales by 1/lam (one lowering against lam*g, two
    inverse factors), so the matrix jets rescale and the origin eigendata
    divide by lam(0); no second operator build is needed.
    """
    inv_lam = invert(lam if lam.backend == FLOAT else lam.to_float())
    mat = [[entry.to_float() * inv_lam for entry in row] for row in spec.matrix_jet]
    nn = len(mat)
    lam0 = float(lam.value())
    coord = spec.coord_matrix / lam0
    basis = _orthonormal_basis(g0)
    change_t = _pair_change(basis, spec.pairs).T
    return SpectralData(
        operator=change_t @ coord @ np.linalg.inv(change_t),
        eigenvalues=tuple(z / lam0 for z in spec.eigenvalues),
        eigenvectors=change_t @ spec.coord_vectors,
        min_gap=spec.min_gap / lam0,
        matrix_jet=mat,
        coord_matrix=coord,
        coord_vectors=spec.coord_vectors,
        exact_matrix=None,
        basis=basis,
        pairs=spec.pairs,
    )


def evaluate_invariants(
    g: MetricJet,
    max_order: int | None = None,
    words=DEFAULT_WORDS,
    checks: bool = True,
):
    """All exportable scalar invariants of order <= max_order, with residuals.

    Returns (values, residuals): InvariantValue rows and (check, float)
    pairs for the internal consistency checks that were run.  With
    ``checks=False`` the redundant cross-checks are skipped; use it in
    hot loops such as finite-difference rank sampling.
    """
    n = g.dim
    if max_order is None:
        max_order = g.order
    fund = fundamental_tensor(g)
    norm = normalize(g, fund)
    values = []
    residuals = []
    if checks:
        f_tensor, g0m = _match_backends(fund.tensor, norm.g0)
        s0_jet = norm_sq(f_tensor, g0m)
        nonconst = (s0_jet - s0_jet.value()).max_abs_coeff()
        residuals.append(("normalized_norm_nonconstant", float(nonconst)))
    if n == 3:
        spec = cotton_york(norm.g0, fund)
        if checks:
            residuals.append(
                (
                    "operator_symmetry",
                    float(np.max(np.abs(spec.operator - spec.operator.T))),
                )
            )
            residuals.append(("operator_trace", float(abs(np.trace(spec.operator)))))
            residuals.append(
                ("eigenvalue_sum", float(abs(sum(z.real for z in spec.eigenvalues))))
            )
        if max_order >= 3:
            # a degenerate operator spectrum blocks the eigen-based stages
            # but not the earlier exports; report what exists
            try:
                cy = cotton_york_scalar(spec)
            except NonSimpleSpectrum:
                return values, residuals
            values.append(InvariantValue("cy2", 3, cy.backend, cy.value()))
            if max_order >= 4 and g.order >= 4:
                frame = cotton_york_frame(norm.g0, spec)
                for j, dv in enumerate(invariant_derivation(frame, cy)):
                    values.append(InvariantValue(f"D{j + 1}_cy2", 4, "float", dv))
                c = structure_constants(frame)
                for k in range(3):
                    for i in range(3):
                        for j in range(i + 1, 3):
                            values.append(
                                InvariantValue(
                                    f"c_{k + 1}_{i + 1}{j + 1}", 4, "float", float(c[k, i, j])
                                )
                            )
                gam = frame_christoffel(norm.g0, frame)
                for k in range(3):
                    for i in range(3):
                        for j in range(i, 3):
                            values.append(
                                InvariantValue(
                                    f"G_{k + 1}_{i + 1}{j + 1}",
                                    4,
                                    "float",
                                    float(0.5 * (gam[k, i, j] + gam[k, j, i])),
                                )
                            )
        return values, residuals

    # n >= 4: traces from the raw structure stay exact when g is exact
    raw_spec = weyl_operator(g, fund)
    if checks:
        residuals.append(
            (
                "operator_symmetry",
                float(np.max(np.abs(raw_spec.operator - raw_spec.operator.T))),
            )
        )
        residuals.append(("operator_trace", float(abs(np.trace(raw_spec.operator)))))
    ti = trace_invariants(raw_spec, fund.s)
    if max_order < 2:
        return values, residuals
    for i, v in sorted(ti.hat.items()):
        values.append(InvariantValue(f"trace{i}", 2, "float", float(v)))
    for (i, j), v in sorted(ti.rational.items()):
        values.append(InvariantValue(f"ratio_{i}_{j}", 2, "exact", v))
    g0f = _as_float_metric(norm.g0)
    spec0 = _rescaled_spectral(raw_spec, norm.lam, g0f)
    try:
        ops = eigen_operators(spec0, g0f)
    except NonSimpleSpectrum:
        # degenerate spectrum (e.g. a product of round spheres): the trace
        # invariants above are still well-defined, the rest is not
        return values, residuals
    for name, v in sorted(word_traces(ops, words).items()):
        values.append(InvariantValue(name, 2, "float", v))
    if max_order >= 3 and g.order >= 3:
        if n == 4 and g.signature == (4, 0):
            # no word in the eigen-operators can have a simple spectrum in
            # 4D (2-forms split into two commuting quaternionic triples),
            # so go straight to the plane-intersection frame
            all_ops = eigen_operators(spec0, g0f, count=6)
            frame = quaternionic_frame_4d(g0f, spec0, all_ops)
        else:
            frame = canonical_frame(g0f, ops)
        if checks:
            gram = frame.matrix().T @ _value_matrix(g0f) @ frame.matrix()
            residuals.append(
                (
                    "frame_gram_offdiagonal",
                    float(np.max(np.abs(gram - np.diag(np.diag(gram))))),
                )
            )
        mat = _float_matrix_jet(spec0.matrix_jet)
        nn = len(mat)
        d = nn - 2
        acc = mat
        for i in range(2, d + 2):
            acc = _matmul_jets(acc, mat)
            tr = None
            for t in range(nn):
                tr = acc[t][t] if tr is None else tr + acc[t][t]
            for j, dv in enumerate(invariant_derivation(frame, tr)):
                values.append(InvariantValue(f"D{j + 1}_trace{i}", 3, "float", dv))
        c = structure_constants(frame)
        for k in range(n):
            for i in range(n):
                for j in range(i + 1, n):
                    values.append(
                        InvariantValue(
                            f"c_{k + 1}_{i + 1}{j + 1}", 3, "float", float(c[k, i, j])
                        )
                    )
        gam = frame_christoffel(g0f, frame)
        for k in range(n):
            for i in range(n):
                for j in range(i, n):
                    values.append(
                        InvariantValue(
                            f"G_{k + 1}_{i + 1}{j + 1}",
                            3,
                            "float",
                            float(0.5 * (gam[k, i, j] + gam[k, j, i])),
                        )
                    )
    return values, residuals


# ---------------------------------------------------------------------------
# Invariance canonicalization and functional independence
# ---------------------------------------------------------------------------

_FRAME_PREFIXES = ("D", "c_", "G_")


def canonicalized_invariants(values) -> dict:
    """Frame-free scalars raw; frame-dependent families as sorted |values|.

    The canonical frame carries a residual finite ambiguity (vector signs
    and, across near-degenerate word spectra, numbering), so the
    comparable data are the sorted absolute values per family.
    """
    out = {}
    families = {}
    for row in values:
        name = row.name
        if name.startswith("D") and "_" in name:
            fam = "deriv_" + name.split("_", 1)[1]
            families.setdefault(fam, []).append(abs(float(row.value)))
        elif name.startswith("c_"):
            families.setdefault("structure", []).append(abs(float(row.value)))
        elif name.startswith("G_"):
            families.setdefault("connection", []).append(abs(float(row.value)))
        else:
            out[name] = float(row.value)
    for fam, vals in families.items():
        for t, v in enumerate(sorted(vals)):
            out[f"{fam}[{t}]"] = v
    return out


def transformed_metric(g: MetricJet, phi=None, conf=None) -> MetricJet:
    """Pull back conf * g under phi; either transformation may be omitted."""
    from .tensors import pullback_metric

    out = g
    if conf is not None:
        n = g.dim
        factor = conf if conf.backend == g.backend else None
        comps = [[g.component(i, j) for j in range(n)] for i in range(n)]
        if factor is None:
            comps = [[c.to_float() for c in row] for row in comps]
            factor = conf.to_float()
        comps = [[c * factor for c in row] for row in comps]
        out = MetricJet.from_components(
            comps, signature=g.signature, basepoint=g.basepoint
        )
    if phi is not None:
        out = pullback_metric(phi, out)
    return out


def invariance_residuals(
    g: MetricJet, phi=None, conf=None, max_order: int | None = None
) -> dict:
    """Relative mismatch of every exported invariant under the group action.

    The canonical frame has a residual finite ambiguity, so frame-dependent
    families are compared through their sorted absolute values; frame-free
    scalars are compared raw.
    """
    other = transformed_metric(g, phi, conf)
    base_vals, _ = evaluate_invariants(g, max_order)
    other_vals, _ = evaluate_invariants(other, max_order)
    a = canonicalized_invariants(base_vals)
    b = canonicalized_invariants(other_vals)
    out = {}
    for key in sorted(set(a) | set(b)):
        if key not in a or key not in b:
            out[key] = math.inf
            continue
        scale = max(abs(a[key]), abs(b[key]), 1.0)
        out[key] = abs(a[key] - b[key]) / scale
    return out


def float_invariants(g: MetricJet, max_order: int | None = None) -> list:
    """Float-valued exported invariants, in export order; rank-test fodder."""
    vals, _ = evaluate_invariants(g, max_order, checks=False)
    return [float(v.value) for v in vals if v.backend == "float"]


def random_float_metric(n: int, k: int, rng) -> MetricJet:
    """Generic Riemannian float metric jet for sampling."""
    comps = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            coeffs = {}
            for alpha in _all_alphas(n, k):
                if sum(alpha) == 0:
                    base = 2.0 * (2 + n) if i == j else 0.0
                    coeffs[alpha] = base + 0.4 * rng.standard_normal()
                else:
                    coeffs[alpha] = 0.4 * rng.standard_normal()
            comps[i][j] = comps[j][i] = Jet(n, k, coeffs, FLOAT)
    return MetricJet.from_components(comps)


def _all_alphas(n, k):
    from .jets import monomials

    return list(monomials(n, k))


def jacobian_rank(
    family,
    n: int,
    k: int,
    seed: int = 0,
    trials: int = 3,
    step: float = 1e-4,
    sv_threshold: float = 1e-7,
    directions: int | None = None,
) -> int:
    """Numerical rank of the invariants' Jacobian over the metric-jet space.

    Central finite differences over the coefficient coordinates of the
    symmetric entries g_ij (i <= j, degree <= k) at a random generic jet;
    the singular-value cut is sv_threshold * sigma_max, and the result is
    the max over trials.  With ``directions`` set, derivatives are taken
    along that many random coefficient directions instead of the full
    basis: rank(J R) <= rank(J) always, with generic equality, so a
    compressed run certifies a lower bound at much lower cost.
    """
    rng = np.random.default_rng(seed)
    alphas = _all_alphas(n, k)
    slots = [(i, j) for i in range(n) for j in range(i, n)]
    n_params = len(slots) * len(alphas)

    def build(coeff_vec):
        comps = [[None] * n for _ in range(n)]
        t = 0
        for (i, j) in slots:
            coeffs = {}
            for a, alpha in enumerate(alphas):
                coeffs[alpha] = float(coeff_vec[t])
                t += 1
            comps[i][j] = comps[j][i] = Jet(n, k, coeffs, FLOAT)
        return MetricJet.from_components(comps)

    def evaluate(coeff_vec):
        g = build(coeff_vec)
        out = []
        for f in family:
            out.extend(float(v) for v in f(g))
        return np.array(out)

    best = 0
    failures = 0
    for _ in range(trials):
        base = np.zeros(n_params)
        t = 0
        for (i, j) in slots:
            for alpha in alphas:
                if sum(alpha) == 0:
                    base[t] = 2.0 * (2 + n) if i == j else 0.4 * rng.standard_normal()
                else:
                    base[t] = 0.4 * rng.standard_normal()
                t += 1
        if directions is None:
            dirs = np.eye(n_params)
        else:
            dirs = rng.standard_normal((n_params, directions))
            dirs /= np.linalg.norm(dirs, axis=0)
        try:
            cols = []
            for c in range(dirs.shape[1]):
                d = dirs[:, c]
                plus = evaluate(base + step * d)
                minus = evaluate(base - step * d)
                cols.append((plus - minus) / (2 * step))
            jac = np.column_stack(cols)
            sv = np.linalg.svd(jac, compute_uv=False)
            if sv.size and sv[0] > 0:
                best = max(best, int(np.sum(sv > sv_threshold * sv[0])))
        except ConfinvError:
            failures += 1
            continue
    if failures == trials:
        raise DegenerateSample("all jacobian trials hit degenerate structures")
    return best
