"""Exact integer normal forms, integer kernels and relation lattices.

All arithmetic is on Python ints.  Hermite normal form is row style: echelon,
positive pivots, and the entries above each pivot reduced into [0, pivot).
Under that convention two bases span the same lattice exactly when their
nonzero HNF rows coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .groups import ElementSet, Element, GroupSpec


@dataclass(frozen=True)
class IntMatrix:
    """A dense rows x cols integer matrix (either dimension may be 0)."""

    rows: tuple[tuple[int, ...], ...]
    ncols: int

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.rows)
        for r in rows:
            if len(r) != self.ncols:
                raise ValueError(f"ragged matrix: row of length {len(r)}, expected {self.ncols}")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def of(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> IntMatrix:
        rows = [list(r) for r in rows]
        if ncols is None:
            if not rows:
                raise ValueError("ncols is required for a matrix without rows")
            ncols = len(rows[0])
        return cls(tuple(tuple(r) for r in rows), ncols)

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), n)

    @classmethod
    def zeros(cls, m: int, n: int) -> IntMatrix:
        return cls(tuple((0,) * n for _ in range(m)), n)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def transpose(self) -> IntMatrix:
        return IntMatrix(
            tuple(tuple(r[j] for r in self.rows) for j in range(self.ncols)), self.nrows
        )

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = list(zip(*other.rows)) if other.rows else [()] * other.ncols
        return IntMatrix(
            tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self.rows),
            other.ncols,
        )

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.rows)

    def nonzero_rows(self) -> IntMatrix:
        return IntMatrix(tuple(r for r in self.rows if any(r)), self.ncols)

    def to_json(self) -> list[list[str]]:
        return [[str(x) for x in r] for r in self.rows]

    @classmethod
    def from_json(cls, data, ncols: int | None = None) -> IntMatrix:
        return cls.of([[int(x) for x in r] for r in data], ncols)


def det(M: IntMatrix) -> int:
    """Determinant by fraction-free (Bareiss) elimination."""
    n = M.nrows
    if n != M.ncols:
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    a = M.tolist()
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _row_sub(rows, i, k, q):
    # rows[i] -= q * rows[k]
    if q:
        ri, rk = rows[i], rows[k]
        for c in range(len(ri)):
            ri[c] -= q * rk[c]


def hnf(M: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Row Hermite normal form: returns ``(H, U)`` with ``H = U @ M``, U unimodular.

    Pivot choice inside a column is the smallest nonzero absolute value, ties
    to the lowest row index; reductions use floor division.
    """
    m, n = M.shape
    H = M.tolist()
    U = IntMatrix.identity(m).tolist()
    r = 0
    for j in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if H[i][j]]
            if not nz:
                break
            piv = min(nz, key=lambda i: (abs(H[i][j]), i))
            H[r], H[piv] = H[piv], H[r]
            U[r], U[piv] = U[piv], U[r]
            settled = True
            for i in range(r + 1, m):
                if H[i][j]:
                    q = H[i][j] // H[r][j]
                    _row_sub(H, i, r, q)
                    _row_sub(U, i, r, q)
                    if H[i][j]:
                        settled = False
            if settled:
                break
        if H[r][j] == 0:
            continue
        if H[r][j] < 0:
            H[r] = [-x for x in H[r]]
            U[r] = [-x for x in U[r]]
        p = H[r][j]
        for i in range(r):
            q = H[i][j] // p
            _row_sub(H, i, r, q)
            _row_sub(U, i, r, q)
        r += 1
    return IntMatrix.of(H, n), IntMatrix.of(U, m)


def hnf_basis(M: IntMatrix) -> IntMatrix:
    """Canonical basis (nonzero HNF rows) of the row lattice of ``M``."""
    return hnf(M)[0].nonzero_rows()


def snf(M: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form: ``(S, U, V)`` with ``S = U @ M @ V`` diagonal.

    Diagonal entries are non-negative and each divides the next; zeros trail.
    """
    m, n = M.shape
    S = M.tolist()
    U = IntMatrix.identity(m).tolist()
    V = IntMatrix.identity(n).tolist()

    def col_sub(j, k, q):
        # column j -= q * column k, in S and V
        if q:
            for row in S:
                row[j] -= q * row[k]
            for row in V:
                row[j] -= q * row[k]

    def col_swap(a, b):
        for row in S:
            row[a], row[b] = row[b], row[a]
        for row in V:
            row[a], row[b] = row[b], row[a]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if S[i][j] and (best is None or abs(S[i][j]) < abs(S[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            i, j = best
            S[t], S[i] = S[i], S[t]
            U[t], U[i] = U[i], U[t]
            if j != t:
                col_swap(t, j)
            p = S[t][t]
            for i in range(t + 1, m):
                q = S[i][t] // p
                _row_sub(S, i, t, q)
                _row_sub(U, i, t, q)
            for j in range(t + 1, n):
                col_sub(j, t, S[t][j] // p)
            if any(S[i][t] for i in range(t + 1, m)) or any(S[t][j] for j in range(t + 1, n)):
                continue
            bad = next(
                (i for i in range(t + 1, m) if any(S[i][j] % p for j in range(t + 1, n))),
                None,
            )
            if bad is None:
                break
            _row_sub(S, t, bad, -1)
            _row_sub(U, t, bad, -1)
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            U[t] = [-x for x in U[t]]
        if S[t][t] == 0:
            break
    return IntMatrix.of(S, n), IntMatrix.of(U, m), IntMatrix.of(V, n)


def integer_kernel(M: IntMatrix) -> IntMatrix:
    """HNF basis of ``{v in Z^cols : M v = 0}`` (a 0-row matrix if trivial)."""
    n = M.ncols
    H, U = hnf(M.transpose())
    rank = sum(1 for r in H.rows if any(r))
    return hnf_basis(IntMatrix(U.rows[rank:], n))


def relation_matrix(spec: GroupSpec, elements: Sequence[Element]) -> IntMatrix:
    """The block matrix [[A_free, 0], [A_torsion, diag(m)]] whose kernel gives relations."""
    s, t, r = len(elements), len(spec.torsion_orders), spec.rank
    rows = []
    for k in range(spec.dim):
        row = [g.coords[k] for g in elements] + [0] * t
        if k >= r:
            row[s + k - r] = spec.torsion_orders[k - r]
        rows.append(row)
    return IntMatrix.of(rows, s + t)


def relations_of(spec: GroupSpec, elements: Sequence[Element]) -> IntMatrix:
    """HNF basis of all m with sum m_j g_j = 0; duplicates among ``elements`` allowed."""
    s = len(elements)
    K = integer_kernel(relation_matrix(spec, elements))
    return hnf_basis(IntMatrix(tuple(r[:s] for r in K.rows), s))


@dataclass(frozen=True)
class RelationLattice:
    """All integer relations among the members of ``elements``, as an HNF basis."""

    elements: ElementSet
    basis: IntMatrix

    @property
    def rank(self) -> int:
        return self.basis.nrows

    def contains(self, v: Sequence[int]) -> bool:
        v = list(v)
        if len(v) != self.basis.ncols:
            raise ValueError("vector length does not match the lattice dimension")
        for row in self.basis.rows:
            c = next(k for k, x in enumerate(row) if x)
            if v[c] % row[c]:
                return False
            q = v[c] // row[c]
            v = [a - q * b for a, b in zip(v, row)]
        return not any(v)

    def index(self):
        """``|Z^s / L|``; infinite unless the lattice has full rank."""
        if self.rank < self.basis.ncols:
            return math.inf
        return math.prod(row[i] for i, row in enumerate(self.basis.rows))


def relation_lattice(E: ElementSet) -> RelationLattice:
    return RelationLattice(E, relations_of(E.spec, E.elements))
