"""Exact rational linear algebra over Q: matrices, reduced echelon forms,
kernels, subspace intersections/sums, and seeded generic subspace sampling.

All arithmetic uses fractions.Fraction, so every rank / membership decision
here is exact.  Subspaces are kept in reduced row-echelon basis form, which
makes subspace equality plain representation equality.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterable, Sequence


class GenericityFailure(Exception):
    """A randomized draw failed its exact verification too many times."""


# retry cap for generic draws; failures surface, never absorbed
RANDOM_SUBSPACE_MAX_DRAWS = 64


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


def frac_str(x: Fraction) -> str:
    """Compact "p" or "p/q" form used by all JSON wire formats."""
    x = _frac(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class Mat:
    """Dense matrix with Fraction entries, row-major."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence], cols: int | None = None):
        self.entries = [[_frac(x) for x in row] for row in entries]
        self.rows = len(self.entries)
        if self.entries:
            self.cols = len(self.entries[0])
        else:
            self.cols = 0 if cols is None else cols
        for row in self.entries:
            if len(row) != self.cols:
                raise ValueError("ragged matrix")

    @staticmethod
    def zero(rows: int, cols: int) -> "Mat":
        return Mat([[Fraction(0)] * cols for _ in range(rows)], cols=cols)

    @staticmethod
    def identity(n: int) -> "Mat":
        return Mat([[Fraction(int(i == j)) for j in range(n)] for i in range(n)])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Mat)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(tuple(r) for r in self.entries)))

    def __repr__(self):
        return f"Mat({self.entries!r})"

    def row(self, i: int) -> list[Fraction]:
        return list(self.entries[i])

    def transpose(self) -> "Mat":
        return Mat([[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)])

    def matmul(self, other: "Mat") -> "Mat":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch in matmul")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                s = Fraction(0)
                for k in range(self.cols):
                    s += self.entries[i][k] * other.entries[k][j]
                row.append(s)
            out.append(row)
        return Mat(out)

    def apply(self, v: Sequence[Fraction]) -> list[Fraction]:
        if len(v) != self.cols:
            raise ValueError("dimension mismatch in apply")
        return [sum((self.entries[i][k] * v[k] for k in range(self.cols)), Fraction(0))
                for i in range(self.rows)]

    def stack(self, other: "Mat") -> "Mat":
        if self.cols != other.cols:
            raise ValueError("column mismatch in stack")
        return Mat(self.entries + other.entries)

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.entries for x in row)

    def to_float_array(self):
        import numpy as np

        return np.array([[float(x) for x in row] for row in self.entries], dtype=float)


def rref(M: Mat) -> tuple[Mat, int, list[int]]:
    """Reduced row echelon form; returns (R, rank, pivot_cols)."""
    a = [list(row) for row in M.entries]
    nrows, ncols = M.rows, M.cols
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        piv = None
        for i in range(r, nrows):
            if a[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = a[r][c]
        a[r] = [x / inv for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return Mat(a), r, pivots


def rank(M: Mat) -> int:
    return rref(M)[1]


def kernel_basis(M: Mat) -> list[list[Fraction]]:
    """Basis of {v : Mv = 0}, read off the reduced echelon form."""
    R, rk, pivots = rref(M)
    n = M.cols
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -R.entries[i][fc]
        basis.append(v)
    return basis


def solve(A: Mat, b: Sequence[Fraction]) -> list[Fraction] | None:
    """One exact solution of Ax = b, or None if inconsistent.

    Free variables are set to zero, so the answer is deterministic.
    """
    if len(b) != A.rows:
        raise ValueError("dimension mismatch in solve")
    aug = Mat([row + [b[i]] for i, row in enumerate(A.entries)])
    R, rk, pivots = rref(aug)
    if A.cols in pivots:  # pivot in the augmented column: inconsistent
        return None
    x = [Fraction(0)] * A.cols
    for i, pc in enumerate(pivots):
        x[pc] = R.entries[i][A.cols]
    return x


class Subspace:
    """Linear subspace of Q^m, stored as a reduced row-echelon basis.

    The canonical form makes equality of subspaces equality of
    representations, which every general-position predicate relies on.
    """

    __slots__ = ("ambient_dim", "basis")

    def __init__(self, ambient_dim: int, vectors: Iterable[Sequence]):
        rows = [[_frac(x) for x in v] for v in vectors]
        for v in rows:
            if len(v) != ambient_dim:
                raise ValueError("vector length != ambient dimension")
        if rows:
            R, rk, _ = rref(Mat(rows))
            self.basis = [R.row(i) for i in range(rk)]
        else:
            self.basis = []
        self.ambient_dim = ambient_dim

    @staticmethod
    def zero(m: int) -> "Subspace":
        return Subspace(m, [])

    @staticmethod
    def full(m: int) -> "Subspace":
        return Subspace(m, Mat.identity(m).entries)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def codim(self) -> int:
        return self.ambient_dim - self.dim

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subspace)
            and self.ambient_dim == other.ambient_dim
            and self.basis == other.basis
        )

    def __hash__(self):
        return hash((self.ambient_dim, tuple(tuple(v) for v in self.basis)))

    def __repr__(self):
        return f"Subspace(m={self.ambient_dim}, dim={self.dim})"

    def basis_matrix(self) -> Mat:
        if not self.basis:
            return Mat.zero(0, self.ambient_dim) if self.ambient_dim else Mat([])
        return Mat(self.basis)

    def contains(self, v: Sequence[Fraction]) -> bool:
        if self.dim == 0:
            return all(_frac(x) == 0 for x in v)
        stacked = Mat(self.basis + [[_frac(x) for x in v]])
        return rank(stacked) == self.dim

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(v) for v in other.basis)

    def is_zero(self) -> bool:
        return self.dim == 0

    def is_full(self) -> bool:
        return self.dim == self.ambient_dim


def kernel(M: Mat) -> Subspace:
    """The nullspace of M as a Subspace of Q^cols."""
    return Subspace(M.cols, kernel_basis(M))


def intersect(A: Subspace, B: Subspace) -> Subspace:
    """Exact intersection of two subspaces of the same ambient space."""
    if A.ambient_dim != B.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    m = A.ambient_dim
    if A.dim == 0 or B.dim == 0:
        return Subspace.zero(m)
    if A.is_full():
        return Subspace(m, B.basis)
    if B.is_full():
        return Subspace(m, A.basis)
    # x in A∩B  <=>  x = c·basisA = d·basisB; solve for (c, d)
    p, q = A.dim, B.dim
    cols = []
    for i in range(m):
        cols.append([A.basis[k][i] for k in range(p)] + [-B.basis[k][i] for k in range(q)])
    stacked = Mat(cols)  # m x (p+q)
    vecs = []
    for cd in kernel_basis(stacked):
        c = cd[:p]
        vecs.append([sum((c[k] * A.basis[k][i] for k in range(p)), Fraction(0)) for i in range(m)])
    return Subspace(m, vecs)


def subspace_sum(A: Subspace, B: Subspace) -> Subspace:
    """A + B, with the modular-law dimension identity asserted."""
    if A.ambient_dim != B.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    out = Subspace(A.ambient_dim, A.basis + B.basis)
    assert out.dim == A.dim + B.dim - intersect(A, B).dim
    return out


def constraint_matrix(S: Subspace) -> Mat:
    """A (codim x m) matrix whose kernel is exactly S.

    Rows are a canonical basis of the annihilator of S, so any linear map
    with nullspace S is row-equivalent to this one.
    """
    m = S.ambient_dim
    if S.dim == 0:
        return Mat.identity(m)
    return Mat(kernel_basis(S.basis_matrix()), cols=m)


def random_subspace(m: int, dim: int, seed: int, coeff_bound: int = 10) -> Subspace:
    """Seeded random subspace with small-integer basis entries.

    Draws are retried until exactly independent; deterministic given the
    seed.  Raises GenericityFailure after RANDOM_SUBSPACE_MAX_DRAWS draws.
    """
    if not 0 <= dim <= m:
        raise ValueError("dim out of range")
    if coeff_bound < 1:
        raise ValueError("coeff_bound must be >= 1")
    if dim == 0:
        return Subspace.zero(m)
    rng = random.Random(seed)
    for _ in range(RANDOM_SUBSPACE_MAX_DRAWS):
        vecs = [[Fraction(rng.randint(-coeff_bound, coeff_bound)) for _ in range(m)]
                for _ in range(dim)]
        if rank(Mat(vecs)) == dim:
            return Subspace(m, vecs)
    raise GenericityFailure(f"no independent {dim}-set in Q^{m} after "
                            f"{RANDOM_SUBSPACE_MAX_DRAWS} draws")
