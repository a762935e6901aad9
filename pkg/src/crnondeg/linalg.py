"""Exact Gaussian elimination over the scalar field."""

from __future__ import annotations

from typing import Sequence

from .errors import SingularError
from .scalars import ONE, ZERO, ComplexScalar, as_scalar

Row = tuple[ComplexScalar, ...]


class RowEchelon:
    """Incrementally maintained reduced row basis.

    ``add`` reduces a candidate row against the basis and keeps it only if
    something survives.  The caller sees whether the span grew, which is all
    the nondegeneracy ladder needs.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self._pivots: list[int] = []
        self._rows: list[list[ComplexScalar]] = []

    @property
    def rank(self) -> int:
        return len(self._rows)

    def reduce(self, row: Sequence) -> list[ComplexScalar]:
        r = [as_scalar(x) for x in row]
        if len(r) != self.ncols:
            raise ValueError(f"row has {len(r)} entries, expected {self.ncols}")
        for p, basis in zip(self._pivots, self._rows):
            c = r[p]
            if c:
                r = [x - c * y if y else x for x, y in zip(r, basis)]
        return r

    def add(self, row: Sequence) -> bool:
        r = self.reduce(row)
        for p, c in enumerate(r):
            if c:
                break
        else:
            return False
        inv = c.inv()
        r = [x * inv for x in r]
        # keep the basis fully reduced so that reduce() needs one pass
        for i, basis in enumerate(self._rows):
            b = basis[p]
            if b:
                self._rows[i] = [x - b * y for x, y in zip(basis, r)]
        self._pivots.append(p)
        self._rows.append(r)
        return True

    def contains(self, row: Sequence) -> bool:
        return not any(self.reduce(row))

    def basis(self) -> list[Row]:
        order = sorted(range(len(self._pivots)), key=lambda i: self._pivots[i])
        return [tuple(self._rows[i]) for i in order]


def rank(rows: Sequence[Sequence], ncols: int | None = None) -> int:
    if ncols is None:
        if not rows:
            return 0
        ncols = len(rows[0])
    ech = RowEchelon(ncols)
    for r in rows:
        ech.add(r)
    return ech.rank


def same_row_space(a: Sequence[Sequence], b: Sequence[Sequence], ncols: int) -> bool:
    ea, eb = RowEchelon(ncols), RowEchelon(ncols)
    for r in a:
        ea.add(r)
    for r in b:
        eb.add(r)
    return ea.basis() == eb.basis()


def identity(n: int) -> list[list[ComplexScalar]]:
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def matmul(a, b):
    return [[sum((x * b[k][j] for k, x in enumerate(row) if x), ZERO) for j in range(len(b[0]))] for row in a]


def inverse(m: Sequence[Sequence]) -> list[list[ComplexScalar]]:
    """Gauss-Jordan inverse; raises SingularError if m is not invertible."""
    n = len(m)
    aug = [[as_scalar(x) for x in row] + [ONE if i == j else ZERO for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise SingularError("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = aug[col][col].inv()
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            c = aug[r][col]
            if r != col and c:
                aug[r] = [x - c * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def pivot_columns(m: Sequence[Sequence]) -> list[int]:
    """Pivot columns of the row echelon form, leftmost first."""
    if not m:
        return []
    ech = RowEchelon(len(m[0]))
    for r in m:
        ech.add(r)
    return sorted(ech._pivots)
