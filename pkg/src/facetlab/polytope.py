"""Point sets, affine hulls and the equality-discovery step.

A :class:`VertexSet` is the explicit solution set S of an integer program.
Its affine hull is read off the null space of the transposed difference
matrix; :func:`eca` keeps only the hull equalities that are not already
implied by a known equality system.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InconsistentInput, ParseError, SingletonSet
from .ratlinalg import (
    ZERO,
    IncrementalRank,
    RationalMatrix,
    dot,
    format_rational,
    nonzero_count,
    null_space_basis,
    primitive,
    rref,
    to_rational,
)


class Relation(enum.Enum):
    EQ = "EQ"
    GE = "GE"
    LE = "LE"

    @property
    def symbol(self) -> str:
        return {"EQ": "=", "GE": ">=", "LE": "<="}[self.value]


@dataclass(frozen=True)
class LinearConstraint:
    """``coeffs . x  REL  rhs`` with exact coefficients."""

    coeffs: tuple[Fraction, ...]
    relation: Relation
    rhs: Fraction

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(to_rational(c) for c in self.coeffs))
        object.__setattr__(self, "rhs", to_rational(self.rhs))
        if not isinstance(self.relation, Relation):
            object.__setattr__(self, "relation", Relation(self.relation))
        if not any(self.coeffs) and not (self.relation is Relation.EQ and self.rhs == 0):
            raise ValueError("all-zero coefficients are only allowed for the trivial equality 0 = 0")

    @classmethod
    def make(cls, coeffs: Iterable, relation, rhs) -> "LinearConstraint":
        if isinstance(relation, str):
            relation = Relation(relation.upper())
        return cls(tuple(coeffs), relation, rhs)

    @property
    def n(self) -> int:
        return len(self.coeffs)

    def lhs(self, x: Sequence) -> Fraction:
        return dot(self.coeffs, x)

    def slack(self, x: Sequence) -> Fraction:
        """Signed slack; nonnegative means satisfied (for EQ, zero means satisfied)."""
        v = self.lhs(x)
        if self.relation is Relation.GE:
            return v - self.rhs
        return self.rhs - v

    def is_satisfied(self, x: Sequence) -> bool:
        s = self.slack(x)
        return s == 0 if self.relation is Relation.EQ else s >= 0

    def is_tight(self, x: Sequence) -> bool:
        return self.lhs(x) == self.rhs

    def as_le(self) -> tuple[tuple[Fraction, ...], Fraction]:
        """(pi, pi0) with the constraint written as ``pi . x <= pi0``."""
        if self.relation is Relation.GE:
            return tuple(-c for c in self.coeffs), -self.rhs
        return self.coeffs, self.rhs

    def negated(self) -> "LinearConstraint":
        flip = {Relation.LE: Relation.GE, Relation.GE: Relation.LE, Relation.EQ: Relation.EQ}
        return LinearConstraint(tuple(-c for c in self.coeffs), flip[self.relation], -self.rhs)

    def canonical(self) -> "LinearConstraint":
        """Coprime integer form.

        Inequalities are only scaled by positive factors.  Equalities are
        additionally signed so the first nonzero coefficient is positive.
        """
        vec = primitive(self.coeffs + (self.rhs,))
        if self.relation is not Relation.EQ:
            # primitive() may have flipped the sign; undo it for inequalities
            ref = next(c for c in self.coeffs + (self.rhs,) if c != 0)
            got = next(c for c in vec if c != 0)
            if (ref > 0) != (got > 0):
                vec = tuple(-v for v in vec)
        return LinearConstraint(vec[:-1], self.relation, vec[-1])

    def to_lin(self) -> str:
        parts = [self.relation.value, format_rational(self.rhs)]
        parts.extend(format_rational(c) for c in self.coeffs)
        return " ".join(parts)

    def pretty(self, names: Sequence[str] | None = None) -> str:
        names = names or [f"x{k + 1}" for k in range(self.n)]
        terms = []
        for c, name in zip(self.coeffs, names):
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            body = name if mag == 1 else f"{format_rational(mag)}*{name}"
            terms.append((sign, body))
        if not terms:
            text = "0"
        else:
            text = ("-" if terms[0][0] == "-" else "") + terms[0][1]
            text += "".join(f" {s} {b}" for s, b in terms[1:])
        return f"{text} {self.relation.symbol} {format_rational(self.rhs)}"

    def __str__(self) -> str:
        return self.to_lin()


@dataclass
class ConstraintSystem:
    """Equalities and inequalities over a common ambient dimension."""

    n: int
    equalities: list[LinearConstraint] = field(default_factory=list)
    inequalities: list[LinearConstraint] = field(default_factory=list)

    def __post_init__(self):
        for c in self.equalities + self.inequalities:
            self._check(c)
        if any(c.relation is not Relation.EQ for c in self.equalities):
            raise ValueError("equalities list holds a non-EQ row")
        if any(c.relation is Relation.EQ for c in self.inequalities):
            raise ValueError("inequalities list holds an EQ row")

    def _check(self, c: LinearConstraint) -> None:
        if c.n != self.n:
            raise ValueError(f"constraint width {c.n} does not match n = {self.n}")

    @classmethod
    def from_constraints(cls, n: int, rows: Iterable[LinearConstraint]) -> "ConstraintSystem":
        sys_ = cls(n)
        for r in rows:
            sys_.add(r)
        return sys_

    def add(self, c: LinearConstraint) -> None:
        self._check(c)
        (self.equalities if c.relation is Relation.EQ else self.inequalities).append(c)

    def all(self) -> list[LinearConstraint]:
        return self.equalities + self.inequalities

    def __len__(self) -> int:
        return len(self.equalities) + len(self.inequalities)

    def violated_by(self, x: Sequence) -> list[LinearConstraint]:
        return [c for c in self.all() if not c.is_satisfied(x)]


class VertexSet:
    """Finite point set, labelled 1..N in input order."""

    def __init__(self, points: Iterable[Sequence], n: int | None = None, *, check_distinct: bool = True):
        pts = [tuple(to_rational(v) for v in p) for p in points]
        if not pts:
            raise ValueError("a vertex set needs at least one point")
        width = len(pts[0]) if n is None else n
        if any(len(p) != width for p in pts):
            raise ValueError("points have inconsistent length")
        if check_distinct and len(set(pts)) != len(pts):
            raise ValueError("points are not pairwise distinct")
        self.n = width
        self.points: tuple[tuple[Fraction, ...], ...] = tuple(pts)

    @property
    def N(self) -> int:
        return len(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, k: int) -> tuple[Fraction, ...]:
        return self.points[k]

    def point(self, label: int) -> tuple[Fraction, ...]:
        """Point by 1-based label."""
        return self.points[label - 1]

    def subset(self, labels: Iterable[int]) -> "VertexSet":
        return VertexSet([self.point(k) for k in sorted(labels)], self.n, check_distinct=False)

    def tight_labels(self, c: LinearConstraint) -> list[int]:
        return [k + 1 for k, p in enumerate(self.points) if c.is_tight(p)]

    def max_of(self, coeffs: Sequence) -> Fraction:
        return max(dot(coeffs, p) for p in self.points)

    def __repr__(self) -> str:
        return f"VertexSet(n={self.n}, N={self.N})"


def _as_constraints(A0) -> list[LinearConstraint]:
    if A0 is None:
        return []
    if isinstance(A0, ConstraintSystem):
        return list(A0.equalities)
    return list(A0)


def difference_matrix(S: VertexSet, anchor: int = 0) -> RationalMatrix:
    """``n x (N-1)`` matrix whose columns are ``s_i - s_anchor``.

    With the default anchor the columns are ``s_2 - s_1, ..., s_N - s_1``.
    """
    if S.N < 2:
        raise SingletonSet("difference matrix needs at least two points")
    base = S.points[anchor]
    cols = [tuple(a - b for a, b in zip(p, base)) for k, p in enumerate(S.points) if k != anchor]
    return RationalMatrix.from_columns(cols, S.n)


def _difference_basis(S: VertexSet, anchor: int = 0) -> IncrementalRank:
    acc = IncrementalRank(S.n)
    base = S.points[anchor]
    for k, p in enumerate(S.points):
        if k == anchor:
            continue
        acc.add([a - b for a, b in zip(p, base)])
        if acc.rank == S.n:
            break
    return acc


def polytope_dimension(S: VertexSet) -> int:
    """Dimension of conv(S), i.e. the rank of the difference matrix."""
    if S.N == 1:
        return 0
    return _difference_basis(S).rank


def affine_hull(S: VertexSet, anchor: int = 0) -> tuple[RationalMatrix, tuple[Fraction, ...]]:
    """Equality system ``A x = b`` cutting out the affine hull of S.

    Rows are a basis of null(V^T)^T in primitive integer form and
    ``b = A s_anchor``.  A full-dimensional set gives a ``0 x n`` matrix.
    """
    n = S.n
    if S.N == 1:
        A = RationalMatrix.identity(n)
        return A, tuple(S.points[0])
    basis = _difference_basis(S, anchor)
    if basis.rank == n:
        return RationalMatrix(cols=n), ()
    if basis.rank == 0:
        A = RationalMatrix.identity(n)
    else:
        # null space of the row basis equals null(V^T)
        B = RationalMatrix(basis._rows, cols=n)
        A = null_space_basis(B).T
    b = A.apply(S.points[anchor])
    return A, b


def hull_equalities(S: VertexSet, anchor: int = 0) -> list[LinearConstraint]:
    A, b = affine_hull(S, anchor)
    return [LinearConstraint(A.row(k), Relation.EQ, b[k]) for k in range(A.rows)]


def _sort_key(row: Sequence[Fraction]):
    return (nonzero_count(row), tuple(row))


@dataclass(frozen=True)
class EcaResult:
    equalities: tuple[LinearConstraint, ...]
    d: int
    dimension: int

    def __iter__(self):
        # allows ``Q, d = eca(...)``
        return iter((list(self.equalities), self.d))


def eca(S: VertexSet, A0=None, anchor: int = 0) -> EcaResult:
    """Find the equalities of conv(S) that are missing from ``A0``.

    Hull rows are visited in ascending nonzero count, ties broken by the
    lexicographic order of their primitive coefficient vectors; a row is kept
    when it raises the rank of the accumulated system by one.  Exactly
    ``d = (n - dim S) - rank(A0)`` rows are returned.
    """
    known = _as_constraints(A0)
    for c in known:
        if c.n != S.n:
            raise ValueError("known equality has the wrong width")
        if c.relation is not Relation.EQ:
            raise ValueError("known system must contain equalities only")
    for k, p in enumerate(S.points):
        for c in known:
            if not c.is_satisfied(p):
                raise InconsistentInput(f"point {k + 1} violates known equality {c.to_lin()}")

    acc = IncrementalRank(S.n)
    for c in known:
        acc.add(c.coeffs)
    m0 = acc.rank
    dim = polytope_dimension(S)
    d = (S.n - dim) - m0

    rows = hull_equalities(S, anchor)
    rows.sort(key=lambda c: _sort_key(c.coeffs))
    found: list[LinearConstraint] = []
    for c in rows:
        if len(found) == d:
            break
        if acc.add(c.coeffs):
            found.append(c.canonical())
    if len(found) != d:
        raise ArithmeticError("hull rows failed to span the missing equalities")
    return EcaResult(tuple(found), d, dim)


def row_space_reducer(rows: Sequence[Sequence]):
    """Return a function mapping a vector to its exact residue modulo ``rows``.

    Two vectors have the same residue iff they differ by a combination of
    the rows.
    """
    rows = [tuple(to_rational(v) for v in r) for r in rows]
    if not rows or not any(any(r) for r in rows):
        return lambda v: tuple(to_rational(x) for x in v)
    R, pivots, _ = rref(RationalMatrix(rows))

    def reduce(v):
        v = [to_rational(x) for x in v]
        for i, p in enumerate(pivots):
            f = v[p]
            if f:
                Ri = R.row(i)
                v = [a - f * b for a, b in zip(v, Ri)]
        return tuple(v)

    return reduce


def equivalent_on_hull(a: LinearConstraint, b: LinearConstraint, equalities: Sequence[LinearConstraint]) -> bool:
    """True when two inequalities define the same halfspace on the affine set.

    Checks ``(pi_a, pi0_a) = lam * (pi_b, pi0_b) + mu . (A, b)`` with lam > 0.
    """
    if a.relation is Relation.EQ or b.relation is Relation.EQ:
        raise ValueError("equivalence is defined for inequalities")
    pa, qa = a.as_le()
    pb, qb = b.as_le()
    red = row_space_reducer([c.coeffs + (c.rhs,) for c in equalities])
    ra = red(pa + (qa,))
    rb = red(pb + (qb,))
    k = next((i for i, v in enumerate(rb) if v != 0), None)
    if k is None:
        return not any(ra)
    lam = ra[k] / rb[k]
    if lam <= 0:
        return False
    return all(x == lam * y for x, y in zip(ra, rb))


# -- text formats -----------------------------------------------------------


def _parse_number(tok: str, line: int) -> Fraction:
    try:
        return to_rational(tok)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad number {tok!r}", line) from exc


def _content_lines(text: str):
    for k, raw in enumerate(text.splitlines(), start=1):
        s = raw.split("#", 1)[0].strip()
        if s:
            yield k, s


def parse_vtx(text: str) -> VertexSet:
    """Parse ``n N`` followed by N rows of n rationals."""
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty vertex file", 1)
    k0, head = lines[0]
    toks = head.split()
    if len(toks) != 2 or not all(t.isdigit() for t in toks):
        raise ParseError("header must be 'n N'", k0)
    n, N = int(toks[0]), int(toks[1])
    if n < 1 or N < 1:
        raise ParseError("n and N must be positive", k0)
    body = lines[1:]
    if len(body) != N:
        where = body[N][0] if len(body) > N else (body[-1][0] + 1 if body else k0 + 1)
        raise ParseError(f"expected {N} points, found {len(body)}", where)
    pts = []
    for k, s in body:
        toks = s.split()
        if len(toks) != n:
            raise ParseError(f"expected {n} coordinates, found {len(toks)}", k)
        pts.append([_parse_number(t, k) for t in toks])
    seen: dict[tuple, int] = {}
    for (k, _), p in zip(body, pts):
        key = tuple(p)
        if key in seen:
            raise ParseError(f"duplicate point (same as line {seen[key]})", k)
        seen[key] = k
    return VertexSet(pts, n)


def format_vtx(S: VertexSet) -> str:
    out = [f"{S.n} {S.N}"]
    out.extend(" ".join(format_rational(v) for v in p) for p in S.points)
    return "\n".join(out) + "\n"


def parse_constraint(line: str, n: int | None = None, lineno: int | None = None) -> LinearConstraint:
    toks = line.split()
    if len(toks) < 3:
        raise ParseError("constraint needs 'REL RHS c1 ... cn'", lineno)
    rel = toks[0].upper()
    if rel not in Relation.__members__:
        raise ParseError(f"unknown relation {toks[0]!r}", lineno)
    rhs = _parse_number(toks[1], lineno)
    coeffs = [_parse_number(t, lineno) for t in toks[2:]]
    if n is not None and len(coeffs) != n:
        raise ParseError(f"expected {n} coefficients, found {len(coeffs)}", lineno)
    if not any(coeffs):
        raise ParseError("all-zero constraint", lineno)
    return LinearConstraint(tuple(coeffs), Relation[rel], rhs)


def parse_lin(text: str, n: int | None = None) -> list[LinearConstraint]:
    out: list[LinearConstraint] = []
    for k, s in _content_lines(text):
        c = parse_constraint(s, n, k)
        if n is None:
            n = c.n
        out.append(c)
    return out


def format_lin(rows: Iterable[LinearConstraint]) -> str:
    return "".join(r.to_lin() + "\n" for r in rows)


def read_vtx(path) -> VertexSet:
    with open(path) as fh:
        return parse_vtx(fh.read())


def read_lin(path, n: int | None = None) -> list[LinearConstraint]:
    with open(path) as fh:
        return parse_lin(fh.read(), n)


def write_vtx(path, S: VertexSet) -> None:
    with open(path, "w") as fh:
        fh.write(format_vtx(S))


def write_lin(path, rows: Iterable[LinearConstraint]) -> None:
    with open(path, "w") as fh:
        fh.write(format_lin(rows))
