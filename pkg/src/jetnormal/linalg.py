"""Exact Gaussian elimination over the rationals.

Matrices are lists of rows of ``Fraction``.  Elimination skips zero
entries, which keeps the sparse systems produced by the normalizers cheap.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import DomainError, InvariantViolation, StructuralError

Matrix = list[list[Fraction]]


def _copy(a: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in a]


def _ncols(a: Sequence[Sequence], default: int = 0) -> int:
    return len(a[0]) if a else default


def row_reduce(a: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = _copy(a)
    nrows, ncols = len(m), _ncols(m)
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        if piv != 1:
            m[r] = [x / piv for x in m[r]]
        prow = m[r]
        nz = [j for j in range(c, ncols) if prow[j]]
        for i in range(nrows):
            f = m[i][c]
            if i != r and f:
                row = m[i]
                for j in nz:
                    row[j] -= f * prow[j]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a: Sequence[Sequence]) -> int:
    return len(row_reduce(a)[1])


def nullspace(a: Sequence[Sequence], ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of the right kernel, one vector per free column."""
    n = _ncols(a, ncols or 0) if ncols is None else ncols
    if not a:
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    rref, pivots = row_reduce(a)
    free = [c for c in range(n) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, pc in zip(rref, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def solve_unique(a: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    """Solve ``a x = b``; the solution must exist and be unique.

    Raises ``InvariantViolation`` otherwise, since every system the
    normalizers build is uniquely solvable.
    """
    n = _ncols(a)
    if len(a) != len(b):
        raise StructuralError("row count of matrix and right-hand side differ")
    aug = [list(row) + [rhs] for row, rhs in zip(a, b)]
    rref, pivots = row_reduce(aug)
    if n in pivots:
        raise InvariantViolation("linear system is inconsistent")
    if len(pivots) != n:
        raise InvariantViolation(
            f"linear system is rank deficient ({len(pivots)} < {n} unknowns)"
        )
    return [rref[i][n] for i in range(n)]


def det(a: Sequence[Sequence]) -> Fraction:
    m = _copy(a)
    n = len(m)
    result = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            result = -result
        piv = m[c][c]
        result *= piv
        for i in range(c + 1, n):
            f = m[i][c] / piv
            if f:
                for j in range(c, n):
                    m[i][j] -= f * m[c][j]
    return result


def inverse(a: Sequence[Sequence]) -> Matrix:
    n = len(a)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    rref, pivots = row_reduce(aug)
    if pivots[:n] != list(range(n)):
        raise DomainError("matrix is singular")
    return [row[n:] for row in rref]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    return [
        [sum((a[i][t] * b[t][j] for t in range(len(b))), Fraction(0)) for j in range(len(b[0]))]
        for i in range(len(a))
    ]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
