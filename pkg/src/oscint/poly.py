"""Multivariate polynomials with exact rational coefficients, pullbacks
through linear maps, the degenerate subspace they span, the nondegeneracy
decision with an exact certificate, and the float quotient norm.

The degenerate/nondegenerate boolean is always decided by exact rank over
Q; floating point is used only for the numeric value of the quotient norm.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .linalg import Mat, frac_str, rank, solve
from .resolution import SplittingStep


class MultiPoly:
    """Polynomial in num_vars variables: exponent tuple -> Fraction.

    Zero coefficients are never stored; equality is structural.
    """

    __slots__ = ("num_vars", "terms")

    def __init__(self, num_vars: int, terms=None):
        self.num_vars = num_vars
        self.terms: dict[tuple[int, ...], Fraction] = {}
        if terms:
            for exps, coeff in (terms.items() if isinstance(terms, dict) else terms):
                exps = tuple(int(e) for e in exps)
                if len(exps) != num_vars:
                    raise ValueError("exponent length != num_vars")
                c = coeff if isinstance(coeff, Fraction) else Fraction(coeff)
                if c != 0:
                    self.terms[exps] = self.terms.get(exps, Fraction(0)) + c
                    if self.terms[exps] == 0:
                        del self.terms[exps]

    @staticmethod
    def zero(num_vars: int) -> "MultiPoly":
        return MultiPoly(num_vars)

    @staticmethod
    def constant(num_vars: int, c) -> "MultiPoly":
        return MultiPoly(num_vars, {(0,) * num_vars: Fraction(c)})

    @staticmethod
    def variable(num_vars: int, i: int) -> "MultiPoly":
        e = [0] * num_vars
        e[i] = 1
        return MultiPoly(num_vars, {tuple(e): Fraction(1)})

    @staticmethod
    def monomial(num_vars: int, exps: Sequence[int], coeff=1) -> "MultiPoly":
        return MultiPoly(num_vars, {tuple(exps): Fraction(coeff)})

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree; the zero polynomial reports 0."""
        return max((sum(e) for e in self.terms), default=0)

    def __eq__(self, other):
        return (isinstance(other, MultiPoly)
                and self.num_vars == other.num_vars
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.num_vars, frozenset(self.terms.items())))

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        if self.num_vars != other.num_vars:
            raise ValueError("variable count mismatch")
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return MultiPoly(self.num_vars, out)

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.num_vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self + (-other)

    def scale(self, c) -> "MultiPoly":
        c = Fraction(c)
        return MultiPoly(self.num_vars, {e: c * v for e, v in self.terms.items()})

    def __mul__(self, other: "MultiPoly") -> "MultiPoly":
        if self.num_vars != other.num_vars:
            raise ValueError("variable count mismatch")
        out: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return MultiPoly(self.num_vars, out)

    def pow(self, k: int) -> "MultiPoly":
        out = MultiPoly.constant(self.num_vars, 1)
        for _ in range(k):
            out = out * self
        return out

    def evaluate(self, point: Sequence[Fraction]) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for xi, ei in zip(point, e):
                v *= Fraction(xi) ** ei
            total += v
        return total

    def evaluate_array(self, points: np.ndarray) -> np.ndarray:
        """Vectorized float evaluation; points has shape (..., num_vars)."""
        out = np.zeros(points.shape[:-1], dtype=float)
        for e, c in self.terms.items():
            term = np.full(points.shape[:-1], float(c))
            for i, ei in enumerate(e):
                if ei:
                    term = term * points[..., i] ** ei
            out += term
        return out

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda item: _grlex_key(item[0]))

    def __repr__(self):
        if not self.terms:
            return "MultiPoly(0)"
        bits = []
        for e, c in self.sorted_terms():
            mono = "*".join(f"x{i}^{ei}" for i, ei in enumerate(e) if ei)
            bits.append(f"{c}" + (f"*{mono}" if mono else ""))
        return "MultiPoly(" + " + ".join(bits) + ")"


def _grlex_key(exps: tuple[int, ...]):
    return (sum(exps), exps)


def monomials(num_vars: int, max_degree: int) -> list[tuple[int, ...]]:
    """All exponent tuples of total degree <= max_degree, graded-lex order."""
    if num_vars == 0:
        return [()]

    def exact_degree(d: int, slots: int):
        if slots == 1:
            yield (d,)
            return
        for e in range(d + 1):
            for rest in exact_degree(d - e, slots - 1):
                yield (e,) + rest

    raw: list[tuple[int, ...]] = []
    for d in range(max_degree + 1):
        raw.extend(sorted(exact_degree(d, num_vars)))
    return raw


def compose(q: MultiPoly, pi: Mat) -> MultiPoly:
    """q composed with the linear map pi: substitute each variable of q by
    the corresponding row of pi as a linear form."""
    if q.num_vars != pi.rows:
        raise ValueError("q variable count != pi rows")
    m = pi.cols
    forms = [MultiPoly(m, {tuple(int(j == k) for k in range(m)): pi.entries[i][j]
                           for j in range(m) if pi.entries[i][j] != 0})
             for i in range(pi.rows)]
    return _substitute(q, forms, m)


def compose_affine(p: MultiPoly, M: Mat, c: Sequence[Fraction]) -> MultiPoly:
    """p composed with the affine map x -> Mx + c (M square, over the same
    variables)."""
    if p.num_vars != M.rows or M.rows != M.cols or len(c) != M.rows:
        raise ValueError("affine map shape mismatch")
    m = M.cols
    forms = []
    for i in range(m):
        terms = {tuple(int(j == k) for k in range(m)): M.entries[i][j]
                 for j in range(m) if M.entries[i][j] != 0}
        ci = Fraction(c[i])
        if ci != 0:
            terms[(0,) * m] = ci
        forms.append(MultiPoly(m, terms))
    return _substitute(p, forms, m)


def _substitute(p: MultiPoly, forms: list[MultiPoly], out_vars: int) -> MultiPoly:
    power_cache: dict[tuple[int, int], MultiPoly] = {}

    def form_pow(i: int, k: int) -> MultiPoly:
        key = (i, k)
        if key not in power_cache:
            power_cache[key] = forms[i].pow(k)
        return power_cache[key]

    result = MultiPoly.zero(out_vars)
    for e, coeff in p.terms.items():
        term = MultiPoly.constant(out_vars, coeff)
        for i, ei in enumerate(e):
            if ei:
                term = term * form_pow(i, ei)
        result = result + term
    return result


def coefficient_vector(p: MultiPoly, basis: list[tuple[int, ...]]) -> list[Fraction]:
    index = {e: i for i, e in enumerate(basis)}
    vec = [Fraction(0)] * len(basis)
    for e, c in p.terms.items():
        if e not in index:
            raise ValueError(f"monomial {e} outside the degree-bounded basis")
        vec[index[e]] = c
    return vec


@lru_cache(maxsize=256)
def _degenerate_columns(pis: tuple[Mat, ...], max_degree: int):
    """Exact coefficient columns of q∘pi_j for every monomial q of degree
    <= max_degree over each map's target; returns (Mat, column metadata)."""
    if not pis:
        raise ValueError("need at least one map")
    m = pis[0].cols
    for pi in pis:
        if pi.cols != m:
            raise ValueError("maps have differing ambient dimensions")
        if rank(pi) != pi.rows:
            raise ValueError("non-surjective map")
    row_basis = monomials(m, max_degree)
    cols = []
    meta = []
    for j, pi in enumerate(pis):
        for e in monomials(pi.rows, max_degree):
            q = MultiPoly.monomial(pi.rows, e)
            vec = coefficient_vector(compose(q, pi), row_basis)
            cols.append(vec)
            meta.append((j, e))
    A = Mat([[cols[c][r] for c in range(len(cols))] for r in range(len(row_basis))])
    return A, tuple(meta), tuple(row_basis)


def degenerate_basis(pis: Sequence[Mat], max_degree: int) -> Mat:
    """Matrix whose column span is the degenerate subspace, in the
    graded-lex monomial coordinate system."""
    A, _, _ = _degenerate_columns(tuple(pis), max_degree)
    return A


@dataclass
class DegeneracyReport:
    is_degenerate: bool
    certificate: Optional[list[tuple[str, MultiPoly]]]
    quotient_norm: float
    residual: dict[tuple[int, ...], float]


def is_degenerate(p: MultiPoly, pis: Sequence[Mat], max_degree: int | None = None,
                  labels: Sequence[str] | None = None) -> DegeneracyReport:
    """Decide exactly whether p is a sum of pullbacks through the maps.

    When it is, the certificate polynomials reproduce p exactly; when it is
    not, the report carries the float residual and its Euclidean length.
    """
    D = max_degree if max_degree is not None else max(p.degree(), 1)
    if p.degree() > D:
        raise ValueError("polynomial degree exceeds the requested bound")
    pis = tuple(pis)
    if labels is None:
        labels = [f"pi{j}" for j in range(len(pis))]
    A, meta, row_basis = _degenerate_columns(pis, D)
    b = coefficient_vector(p, list(row_basis))
    sol = solve(A, b)
    if sol is not None:
        cert_polys = [MultiPoly.zero(pi.rows) for pi in pis]
        for c, (j, e) in zip(sol, meta):
            if c != 0:
                cert_polys[j] = cert_polys[j] + MultiPoly.monomial(pis[j].rows, e, c)
        recon = MultiPoly.zero(p.num_vars)
        for q, pi in zip(cert_polys, pis):
            recon = recon + compose(q, pi)
        assert recon == p
        return DegeneracyReport(True, list(zip(labels, cert_polys)), 0.0, {})
    resid = _float_residual(A, b)
    qnorm = float(np.linalg.norm(resid))
    residual = {e: float(r) for e, r in zip(row_basis, resid) if abs(r) > 0}
    return DegeneracyReport(False, None, qnorm, residual)


def _float_residual(A: Mat, b: Sequence[Fraction]) -> np.ndarray:
    Af = A.to_float_array()
    bf = np.array([float(x) for x in b])
    coeffs, *_ = np.linalg.lstsq(Af, bf, rcond=None)
    return bf - Af @ coeffs


def nd_norm(p: MultiPoly, pis: Sequence[Mat], max_degree: int | None = None) -> float:
    """Euclidean distance of p's coefficient vector from the degenerate
    subspace; exactly 0.0 iff p is degenerate (exact rank short-circuit)."""
    return is_degenerate(p, pis, max_degree).quotient_norm


def slice_subtract(p: MultiPoly, step: SplittingStep, z: Sequence[Fraction]) -> MultiPoly:
    """Subtract from p its value frozen along the split entry's nullspace:
    Q(x, y) = P(x, y) - P(x, z) in the coordinates splitting the ambient
    space as (W' + W'') x V0.

    The subtracted part is a polynomial pullback through any map with
    nullspace V0, so Q and P lie in the same nondegeneracy class.
    """
    v0 = step.parent.subspace(step.witness.alpha0)
    m = v0.ambient_dim
    if p.num_vars != m:
        raise ValueError("polynomial variable count != ambient dimension")
    w_basis = step.Wprime.basis + step.Wdoubleprime.basis
    if len(z) != v0.dim:
        raise ValueError("z must have one coordinate per V0 basis vector")
    cols = w_basis + v0.basis
    if len(cols) != m:
        raise ValueError("splitting data does not span the ambient space")
    T = Mat(cols).transpose()  # columns: W basis then V0 basis
    kappa0 = len(w_basis)
    # inverse of T, column by column
    inv_cols = []
    for i in range(m):
        e = [Fraction(int(k == i)) for k in range(m)]
        x = solve(T, e)
        if x is None:
            raise ValueError("splitting data is degenerate (T not invertible)")
        inv_cols.append(x)
    Tinv = Mat(inv_cols).transpose()
    # projection onto W along V0
    D = Mat([[Fraction(int(i == j and i < kappa0)) for j in range(m)] for i in range(m)])
    proj = T.matmul(D).matmul(Tinv)
    z0 = [sum((Fraction(z[k]) * v0.basis[k][i] for k in range(v0.dim)), Fraction(0))
          for i in range(m)]
    frozen = compose_affine(p, proj, z0)
    return p - frozen


# ---------------------------------------------------------------------------
# JSON wire formats


def poly_to_json(p: MultiPoly) -> dict:
    return {"vars": p.num_vars,
            "terms": [{"exps": list(e), "coeff": frac_str(c)}
                      for e, c in p.sorted_terms()]}


def poly_from_json(obj: dict) -> MultiPoly:
    n = int(obj["vars"])
    return MultiPoly(n, [(tuple(t["exps"]), Fraction(str(t["coeff"])))
                         for t in obj["terms"]])


def mat_to_json(M: Mat) -> list[list[str]]:
    return [[frac_str(x) for x in row] for row in M.entries]


def mat_from_json(rows) -> Mat:
    return Mat([[Fraction(str(x)) for x in row] for row in rows])


def report_to_json(report: DegeneracyReport) -> dict:
    return {
        "is_degenerate": report.is_degenerate,
        "certificate": (None if report.certificate is None else
                        [{"label": lab, "poly": poly_to_json(q)}
                         for lab, q in report.certificate]),
        "quotient_norm": report.quotient_norm,
        "residual": [{"exps": list(e), "coeff": c}
                     for e, c in sorted(report.residual.items(),
                                        key=lambda item: _grlex_key(item[0]))],
    }
