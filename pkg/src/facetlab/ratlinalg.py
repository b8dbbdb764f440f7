"""Exact linear algebra over the rationals.

Entries are :class:`fractions.Fraction`.  Elimination runs on integer rows
(each row scaled by the lcm of its denominators) with gcd normalisation, which
is far cheaper than Fraction arithmetic and gives the same row space.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from numbers import Rational as _RationalABC
from typing import Iterable, Sequence

import numpy as np

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def to_rational(value) -> Fraction:
    """Convert ``value`` to an exact Fraction.

    Strings may be integers, ``p/q`` or exact decimals (``"0.999"`` becomes
    999/1000).  Floats go through their shortest repr so that ``0.999`` also
    means 999/1000 rather than the nearest binary double.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, _RationalABC)):
        return Fraction(value)
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise ValueError(f"not a finite number: {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def format_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _int_row(row: Sequence[Fraction]) -> list[int]:
    den = reduce(lcm, (q.denominator for q in row), 1)
    return [q.numerator * (den // q.denominator) for q in row]


def _primitive_int(row: list[int]) -> list[int]:
    g = reduce(gcd, row, 0)
    if g > 1:
        row = [v // g for v in row]
    return row


def primitive(vec: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Scale ``vec`` to coprime integers with first nonzero entry positive."""
    ints = _primitive_int(_int_row([to_rational(v) for v in vec]))
    for v in ints:
        if v:
            if v < 0:
                ints = [-w for w in ints]
            break
    return tuple(Fraction(v) for v in ints)


def nonzero_count(vec: Sequence) -> int:
    return sum(1 for v in vec if v != 0)


class RationalMatrix:
    """Immutable dense matrix of Fractions.

    Zero-sized shapes are only produced by operations (an ``n x 0`` null-space
    basis, a ``0 x n`` affine hull); the linear-algebra routines reject them.
    """

    __slots__ = ("_rows", "rows", "cols")

    def __init__(self, data: Iterable[Iterable] = (), *, cols: int | None = None):
        rows = tuple(tuple(to_rational(v) for v in r) for r in data)
        if rows:
            width = len(rows[0])
            if any(len(r) != width for r in rows):
                raise ValueError("ragged rows")
            if cols is not None and cols != width:
                raise ValueError("cols does not match row width")
        else:
            if cols is None:
                raise ValueError("an empty matrix needs an explicit column count")
            width = cols
        self._rows = rows
        self.rows = len(rows)
        self.cols = width

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> "RationalMatrix":
        if not columns:
            return cls([[] for _ in range(rows)]) if rows else cls(cols=0)
        return cls(zip(*columns))

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls([[0] * cols for _ in range(rows)], cols=cols)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_empty(self) -> bool:
        return self.rows == 0 or self.cols == 0

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self._rows[i]

    def col(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self._rows)

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self._rows]

    def row_tuples(self) -> tuple[tuple[Fraction, ...], ...]:
        return self._rows

    def columns(self) -> list[tuple[Fraction, ...]]:
        return [self.col(j) for j in range(self.cols)]

    @property
    def T(self) -> "RationalMatrix":
        if self.rows == 0:
            return RationalMatrix([[] for _ in range(self.cols)]) if self.cols else RationalMatrix(cols=0)
        return RationalMatrix(zip(*self._rows), cols=self.rows)

    def __getitem__(self, idx):
        i, j = idx
        return self._rows[i][j]

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = other.columns()
        return RationalMatrix(
            ([sum((a * b for a, b in zip(r, c)), ZERO) for c in cols] for r in self._rows),
            cols=other.cols,
        )

    def apply(self, vec: Sequence) -> tuple[Fraction, ...]:
        """Matrix-vector product."""
        v = [to_rational(x) for x in vec]
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(sum((a * b for a, b in zip(r, v)), ZERO) for r in self._rows)

    def is_zero(self) -> bool:
        return all(v == 0 for r in self._rows for v in r)

    def vstack(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.cols:
            raise ValueError("column mismatch")
        return RationalMatrix(self._rows + other._rows, cols=self.cols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self.shape, self._rows))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(format_rational(v) for v in r) for r in self._rows)
        return f"RationalMatrix({self.rows}x{self.cols}: [{body}])"


def _require_nonempty(M: RationalMatrix) -> None:
    if M.is_empty:
        raise ValueError(f"operation needs a nonempty matrix, got shape {M.shape}")


def _int_gauss_jordan(rows: list[list[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """Fraction-free Gauss-Jordan on integer rows.

    Returns primitive integer pivot rows (pivot entry positive, zero above and
    below every pivot) and the pivot columns.
    """
    rows = [r for r in (_primitive_int(list(r)) for r in rows) if any(r)]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(rows):
            break
        p = next((k for k in range(r, len(rows)) if rows[k][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        prow = rows[r]
        if prow[c] < 0:
            prow = rows[r] = [-v for v in prow]
        a = prow[c]
        for k in range(len(rows)):
            if k == r:
                continue
            f = rows[k][c]
            if f:
                g = gcd(a, f)
                ka, kf = a // g, f // g
                rows[k] = _primitive_int([ka * x - kf * y for x, y in zip(rows[k], prow)])
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def rref(M: RationalMatrix) -> tuple[RationalMatrix, list[int], int]:
    """Reduced row echelon form.

    Returns ``(R, pivot_cols, rank)`` where ``R`` has the same shape as ``M``
    (zero rows at the bottom).
    """
    _require_nonempty(M)
    int_rows, pivots = _int_gauss_jordan([_int_row(r) for r in M.row_tuples()], M.cols)
    out = []
    for row, c in zip(int_rows, pivots):
        a = row[c]
        out.append([Fraction(v, a) for v in row])
    out.extend([[ZERO] * M.cols for _ in range(M.rows - len(out))])
    return RationalMatrix(out, cols=M.cols), pivots, len(pivots)


class IncrementalRank:
    """Row echelon basis that accepts vectors one at a time.

    ``add`` reports whether the vector was independent of everything seen so
    far.  Stored rows are primitive integer vectors sorted by leading column.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self._rows: list[list[int]] = []
        self._leads: list[int] = []

    @property
    def rank(self) -> int:
        return len(self._rows)

    def _reduce(self, vec: list[int]) -> list[int]:
        for row, c in zip(self._rows, self._leads):
            f = vec[c]
            if f:
                a = row[c]
                g = gcd(a, f)
                ka, kf = a // g, f // g
                vec = [ka * x - kf * y for x, y in zip(vec, row)]
        return vec

    def reduces_to_zero(self, vec: Sequence) -> bool:
        return not any(self._reduce(_int_row([to_rational(v) for v in vec])))

    def add(self, vec: Sequence) -> bool:
        if len(vec) != self.ncols:
            raise ValueError("vector length mismatch")
        ints = vec if _all_int(vec) else _int_row([to_rational(v) for v in vec])
        return self.add_int(list(ints))

    def add_int(self, vec: list[int]) -> bool:
        v = self._reduce(vec)
        lead = next((k for k, x in enumerate(v) if x), None)
        if lead is None:
            return False
        v = _primitive_int(v)
        pos = 0
        while pos < len(self._leads) and self._leads[pos] < lead:
            pos += 1
        self._rows.insert(pos, v)
        self._leads.insert(pos, lead)
        return True

    def copy(self) -> "IncrementalRank":
        other = IncrementalRank(self.ncols)
        other._rows = list(self._rows)
        other._leads = list(self._leads)
        return other


def _all_int(vec) -> bool:
    return all(type(v) is int for v in vec)


def rank(M: RationalMatrix) -> int:
    """Exact rank over the rationals."""
    _require_nonempty(M)
    return rank_of_rows(M.row_tuples(), M.cols)


def rank_of_rows(rows: Iterable[Sequence], ncols: int, cap: int | None = None) -> int:
    """Rank of a row collection; stops early once ``cap`` is reached."""
    acc = IncrementalRank(ncols)
    limit = min(ncols, cap) if cap is not None else ncols
    for r in rows:
        acc.add(r)
        if acc.rank >= limit:
            break
    return acc.rank


def null_space_basis(M: RationalMatrix) -> RationalMatrix:
    """Basis of ``{x : M x = 0}`` as the columns of a ``cols x k`` matrix.

    One basis vector per free column of the RREF, scaled to primitive integer
    form with a positive first nonzero entry.
    """
    R, pivots, r = rref(M)
    n = M.cols
    pivot_set = set(pivots)
    basis = []
    for f in range(n):
        if f in pivot_set:
            continue
        v = [ZERO] * n
        v[f] = ONE
        for i, p in enumerate(pivots):
            v[p] = -R[i, f]
        basis.append(primitive(v))
    if not basis:
        return RationalMatrix([[] for _ in range(n)]) if n else RationalMatrix(cols=0)
    return RationalMatrix.from_columns(basis, n)


def dot(a: Sequence, b: Sequence) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), ZERO)



MOD_PRIME = 2_147_483_647  # 2**31 - 1: products of residues fit in int64


def rank_mod_p(rows: Iterable[Sequence[int]], ncols: int, p: int = MOD_PRIME, cap: int | None = None) -> int:
    """Rank of an integer matrix over GF(p), by vectorised elimination.

    Never exceeds the rational rank (a minor that is nonzero mod p is
    nonzero over Z), so it is a certified lower bound.
    """
    if p >= 1 << 31:
        raise ValueError("p must be below 2**31 for int64 elimination")
    M = np.array([[a % p for a in r] for r in rows], dtype=np.int64).reshape(-1, ncols)
    limit = min(ncols, M.shape[0], cap if cap is not None else ncols)
    r = 0
    for c in range(ncols):
        if r >= limit:
            break
        nz = np.flatnonzero(M[r:, c])
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            M[[r, k]] = M[[k, r]]
        inv = pow(int(M[r, c]), p - 2, p)
        M[r] = M[r] * inv % p
        f = M[r + 1:, c].copy()
        M[r + 1:] = (M[r + 1:] - f[:, None] * M[r]) % p
        r += 1
    return r


def certified_rank(rows: Sequence[Sequence[int]], ncols: int, upper: int | None = None) -> int:
    """Exact rational rank of integer ``rows``.

    ``upper`` must be a known upper bound on the rank.  The cheap modular
    rank is tried first; when it meets ``upper`` the answer is certified,
    otherwise fall back to exact elimination.
    """
    rows = list(rows)
    if not rows:
        return 0
    if upper is not None and rank_mod_p(rows, ncols, cap=upper) >= upper:
        return upper
    return rank_of_rows(rows, ncols, cap=upper)
