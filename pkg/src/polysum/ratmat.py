"""Exact rational scalars and dense matrices.

Scalars are :class:`fractions.Fraction`, which is always kept in lowest
terms with a positive denominator.  Matrices are immutable row-major grids
of fractions; every operation returns a new matrix.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction
Vector = tuple  # tuple of Fraction

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"`` or ``"p"`` (optional sign).  Integers pass through."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"expected a rational string, got {text!r}")
    match = _RATIONAL_RE.match(text)
    if match is None:
        raise ValueError(f"malformed rational {text!r}")
    num, den = match.group(1), match.group(2)
    if den is not None and int(den) == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den) if den is not None else 1)


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def as_vector(values: Iterable) -> Vector:
    return tuple(parse_rational(v) if isinstance(v, str) else Fraction(v) for v in values)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    if len(u) != len(v):
        raise ValueError(f"length mismatch {len(u)} vs {len(v)}")
    return sum((p * q for p, q in zip(u, v)), Fraction(0))


class RationalMatrix:
    """Immutable dense matrix over the rationals."""

    __slots__ = ("_rows", "_ncols", "_hash")

    def __init__(self, rows: Iterable[Iterable], cols: int | None = None):
        grid = tuple(as_vector(r) for r in rows)
        if grid:
            width = len(grid[0])
            if any(len(r) != width for r in grid):
                raise ValueError("ragged rows")
            if cols is not None and cols != width:
                raise ValueError(f"declared {cols} columns, rows have {width}")
        else:
            width = cols or 0
        self._rows = grid
        self._ncols = width
        self._hash = None

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "RationalMatrix":
        return cls([[0] * ncols for _ in range(nrows)], cols=ncols)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], cols=n)

    @property
    def rows(self) -> int:
        return len(self._rows)

    @property
    def cols(self) -> int:
        return self._ncols

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def row(self, i: int) -> Vector:
        return self._rows[i]

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self._rows)

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self._rows]

    def __iter__(self):
        return iter(self._rows)

    def __getitem__(self, idx):
        i, j = idx
        return self._rows[i][j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._ncols, self._rows))
        return self._hash

    def __repr__(self) -> str:
        body = "; ".join(" ".join(format_rational(v) for v in r) for r in self._rows)
        return f"RationalMatrix({self.rows}x{self.cols}: [{body}])"

    def select_columns(self, idx: Sequence[int]) -> "RationalMatrix":
        return RationalMatrix([[r[j] for j in idx] for r in self._rows], cols=len(idx))

    def select_rows(self, idx: Sequence[int]) -> "RationalMatrix":
        return RationalMatrix([self._rows[i] for i in idx], cols=self.cols)

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix([self.column(j) for j in range(self.cols)], cols=self.rows)

    def hstack(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.rows != other.rows:
            raise ValueError("hstack needs equal row counts")
        return RationalMatrix([a + b for a, b in zip(self._rows, other._rows)],
                              cols=self.cols + other.cols)

    def vstack(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.cols:
            raise ValueError("vstack needs equal column counts")
        return RationalMatrix(self._rows + other._rows, cols=self.cols)

    def matvec(self, v: Sequence) -> Vector:
        if len(v) != self.cols:
            raise ValueError(f"vector of length {len(v)} for {self.rows}x{self.cols} matrix")
        return tuple(dot(r, v) for r in self._rows)

    def matmul(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise ValueError("inner dimensions differ")
        cols = [other.column(j) for j in range(other.cols)]
        return RationalMatrix([[dot(r, c) for c in cols] for r in self._rows], cols=other.cols)


def _rref_rows(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """In-place Gauss-Jordan elimination restricted to the first ``ncols`` columns."""
    pivots: list[int] = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        if piv != 1:
            rows[r] = [v / piv for v in rows[r]]
        prow = rows[r]
        for i in range(nrows):
            if i != r:
                f = rows[i][c]
                if f != 0:
                    rows[i] = [v - f * pv for v, pv in zip(rows[i], prow)]
        pivots.append(c)
        r += 1
    return rows, pivots


def rref(m: RationalMatrix) -> tuple[RationalMatrix, int, list[int]]:
    """Reduced row echelon form, rank and ascending pivot columns."""
    rows, pivots = _rref_rows([list(r) for r in m], m.cols)
    return RationalMatrix(rows, cols=m.cols), len(pivots), pivots


def rank(m: RationalMatrix) -> int:
    return rref(m)[1]


def kernel_basis(m: RationalMatrix) -> list[Vector]:
    """Basis of the null space, one vector per free column."""
    reduced, _, pivots = rref(m)
    free = [j for j in range(m.cols) if j not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * m.cols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -reduced[i, f]
        basis.append(tuple(v))
    return basis


def nullity(m: RationalMatrix) -> int:
    return m.cols - rank(m)


def solve(m: RationalMatrix, rhs: Sequence) -> Vector | None:
    """Unique solution of ``m x = rhs``, or ``None`` if inconsistent or rank deficient."""
    if len(rhs) != m.rows:
        raise ValueError(f"rhs of length {len(rhs)} for a matrix with {m.rows} rows")
    n = m.cols
    aug = [list(r) + [Fraction(v)] for r, v in zip(m, rhs)]
    rows, pivots = _rref_rows(aug, n)
    if len(pivots) < n:
        return None
    if any(row[n] != 0 for row in rows[n:]):
        return None
    return tuple(rows[i][n] for i in range(n))


def row_basis(m: RationalMatrix, rhs: Sequence | None = None):
    """Independent rows spanning the row space of ``[m | rhs]``.

    Returns ``(reduced_matrix, reduced_rhs, consistent)``.  When ``rhs`` is
    inconsistent with ``m`` the flag is ``False``.
    """
    n = m.cols
    vals = list(rhs) if rhs is not None else [0] * m.rows
    aug = [list(r) + [Fraction(v)] for r, v in zip(m, vals)]
    rows, pivots = _rref_rows(aug, n)
    k = len(pivots)
    consistent = all(row[n] == 0 for row in rows[k:])
    reduced = RationalMatrix([row[:n] for row in rows[:k]], cols=n)
    return reduced, tuple(row[n] for row in rows[:k]), consistent
