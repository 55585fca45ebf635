"""Matrices with series entries: Jacobians, determinants, adjugates, ranks."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import NamedTuple, Sequence

from .series import Series, constant, partial


@dataclass(frozen=True)
class SeriesMatrix:
    rows: int
    cols: int
    entries: tuple  # row-major

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match shape")
        if self.entries:
            n = self.entries[0].nvars
            if any(e.nvars != n for e in self.entries):
                raise ValueError("entries live in different rings")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Series]]):
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged matrix")
        return cls(len(rows), ncols, tuple(e for r in rows for e in r))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i):
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self):
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def nvars(self) -> int:
        return self.entries[0].nvars

    @property
    def prec(self) -> int:
        return min(e.prec for e in self.entries)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "SeriesMatrix":
        return SeriesMatrix.from_rows([[self[i, j] for j in cols] for i in rows])

    def map(self, fn) -> "SeriesMatrix":
        return SeriesMatrix(self.rows, self.cols, tuple(fn(e) for e in self.entries))

    def __matmul__(self, other):
        if isinstance(other, SeriesMatrix):
            if self.cols != other.rows:
                raise ValueError("shape mismatch")
            out = []
            for i in range(self.rows):
                for j in range(other.cols):
                    acc = self[i, 0] * other[0, j]
                    for k in range(1, self.cols):
                        acc = acc + self[i, k] * other[k, j]
                    out.append(acc)
            return SeriesMatrix(self.rows, other.cols, tuple(out))
        return matvec(self, other)


def matvec(A: SeriesMatrix, v: Sequence[Series]) -> tuple:
    if A.cols != len(v):
        raise ValueError("shape mismatch")
    out = []
    for i in range(A.rows):
        acc = None
        for j in range(A.cols):
            t = A[i, j] * v[j]
            acc = t if acc is None else acc + t
        out.append(acc)
    return tuple(out)


def identity(m: int, nvars: int, prec: int) -> SeriesMatrix:
    one, zero = constant(1, nvars, prec), constant(0, nvars, prec)
    return SeriesMatrix.from_rows([[one if i == j else zero for j in range(m)] for i in range(m)])


def jacobian(fs: Sequence[Series], variables: Sequence[int]) -> SeriesMatrix:
    """Entry ``(i, j)`` is the derivative of ``fs[i]`` in variable ``variables[j]``."""
    return SeriesMatrix.from_rows([[partial(f, v) for v in variables] for f in fs])


def _det_laplace(rows, nvars, prec):
    """Determinant by Laplace expansion along the first row, memoized on column sets."""
    m = len(rows)

    @lru_cache(maxsize=None)
    def minor(start, cols):
        if start == m:
            return constant(1, nvars, prec)
        acc = None
        for pos, j in enumerate(cols):
            entry = rows[start][j]
            if entry.is_zero():
                continue
            rest = cols[:pos] + cols[pos + 1:]
            t = entry * minor(start + 1, rest)
            if pos % 2:
                t = -t
            acc = t if acc is None else acc + t
        if acc is None:
            return Series._raw(nvars, {}, min([prec] + [rows[start][j].prec for j in cols]))
        return acc

    return minor(0, tuple(range(m))).truncate(prec)


def det(A: SeriesMatrix) -> Series:
    if A.rows != A.cols:
        raise ValueError("determinant of a non-square matrix")
    if A.rows == 0:
        raise ValueError("empty matrix has no ring")
    return _det_laplace(A.to_rows(), A.nvars, A.prec)


def det_and_adjugate(A: SeriesMatrix) -> tuple:
    """``(delta, M)`` with ``M A = A M = delta I``.

    The adjugate of a 1x1 matrix is ``[1]``.  Determinants use cofactor
    expansion, memoized over column subsets so that larger matrices stay
    division-free and polynomial in cost.
    """
    if A.rows != A.cols:
        raise ValueError("adjugate of a non-square matrix")
    m = A.rows
    if m == 0:
        raise ValueError("empty matrix")
    delta = det(A)
    nv, prec = A.nvars, A.prec
    if m == 1:
        return delta, SeriesMatrix(1, 1, (constant(1, nv, prec),))
    rows = A.to_rows()
    adj = [[None] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            # adj[j][i] = (-1)^(i+j) * det(A without row i, column j)
            sub = [[rows[r][c] for c in range(m) if c != j] for r in range(m) if r != i]
            cof = _det_laplace(sub, nv, prec)
            adj[j][i] = -cof if (i + j) % 2 else cof
    return delta, SeriesMatrix.from_rows(adj)


class RankCertificate(NamedTuple):
    rank: int
    rows: tuple
    cols: tuple
    minor: Series | None
    exact: bool  # True when the bound equals min(rows, cols), so rank is certified exactly


def rank_lower_bound(A: SeriesMatrix) -> RankCertificate:
    """Largest r with an r x r minor nonzero at working precision.

    This certifies rank >= r over the fraction field.  Only when r equals the
    smaller dimension is the rank known exactly.
    """
    top = min(A.rows, A.cols)
    for r in range(top, 0, -1):
        for rs in combinations(range(A.rows), r):
            for cs in combinations(range(A.cols), r):
                d = det(A.submatrix(rs, cs))
                if not d.is_zero():
                    return RankCertificate(r, rs, cs, d, r == top)
    return RankCertificate(0, (), (), None, top == 0)
