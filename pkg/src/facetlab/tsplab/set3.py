"""The eleven beta-parameterised inequality families mined for TSP_H(beta).

Every reference coefficient lives in :data:`COEFFICIENTS`, one function per
family returning its rows as ``(relation, rhs, {symbol: coefficient})``.
Symbols name the arc variables relative to the pair (i, j):

``z1i z1j zi1 zj1 zij zji xij xji``
    single arc variables;
``Sxi`` / ``Sxj``
    ``sum x_ia`` / ``sum x_ja`` over a = 2..n, a != i, j;
``Sxj1``
    ``sum x_ja`` over a = 1..n, a != i, j (family 1);
``Sxj_all``
    ``sum x_ja`` over every a != j (family 2, which has no i).

:func:`set3_constraint` expands the symbols and substitutes the x-arcs at
node 1 into :class:`TspSpace` coordinates.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Callable, Iterable

import numpy as np

from ..errors import NotApplicable, NTooSmall
from ..polytope import LinearConstraint, Relation
from ..ratlinalg import certified_rank, rank_of_rows, to_rational
from .tours import TspSpace, enumerate_tours, integer_points, tour_to_point

GE, LE = Relation.GE, Relation.LE


class Applicability(enum.Enum):
    ALL_N = "ALL_N"
    EVEN_N = "EVEN_N"


class Arity(enum.Enum):
    PAIR = "PAIR"
    SINGLE = "SINGLE"


@dataclass(frozen=True)
class Set3Family:
    id: int
    applicability: Applicability = Applicability.ALL_N
    arity: Arity = Arity.PAIR

    def applies_to(self, n: int) -> bool:
        return self.applicability is Applicability.ALL_N or n % 2 == 0


FAMILIES = {k: Set3Family(k) for k in range(1, 12)}
FAMILIES[2] = Set3Family(2, arity=Arity.SINGLE)
FAMILIES[11] = Set3Family(11, applicability=Applicability.EVEN_N)

MIN_N = 6


def geo(b: Fraction, lo: int, hi: int) -> Fraction:
    """``sum_{a=lo}^{hi} b^a`` (0 for an empty range)."""
    return sum((b ** a for a in range(lo, hi + 1)), Fraction(0))


Row = tuple[Relation, Fraction, dict[str, Fraction]]


def _f1(n, b) -> list[Row]:
    t = {"Sxj1": 1, "xij": -b}
    lo = dict(t, zij=b ** (n - 1), zji=b ** (n - 1))
    hi = dict(t, zij=b, zji=b)
    return [(GE, b ** (n - 1), lo), (LE, b, hi)]


def _f2(n, b) -> list[Row]:
    lo = {"Sxj_all": 1, "z1j": b ** (n - 2) - b, "zj1": b ** (n - 2) - b ** (n - 1)}
    hi = {"Sxj_all": 1, "z1j": b ** 2 - b, "zj1": b ** 2 - b ** (n - 1)}
    return [(GE, b ** (n - 2), lo), (LE, b ** 2, hi)]


def _f3(n, b) -> list[Row]:
    return [(LE, Fraction(0), {"xji": 1, "z1j": -(b - b ** 2), "zji": -b ** 2})]


def _f4(n, b) -> list[Row]:
    s5, s4 = geo(b, 0, n - 5), geo(b, 0, n - 4)
    return [(GE, b ** (n - 2), {
        "z1j": b ** (n - 2) - b,
        "zi1": (b ** (n - 3) - b ** (2 * n - 6)) / s5,
        "zj1": b ** (n - 2),
        "zji": -b ** (n - 3) / s5,
        "xji": s4 / s5,
        "Sxj": 1,
    })]


def _f5(n, b) -> list[Row]:
    s5, s4 = geo(b, 0, n - 5), geo(b, 0, n - 4)
    return [(GE, b ** (n - 2), {
        "z1j": b ** (n - 3) - b,
        "zi1": b ** (n - 2) - b ** (n - 3),
        "zj1": b ** (n - 2),
        "zji": (b ** (2 * n - 6) + b ** (n - 3)) / s4,
        "xji": (s5 - b ** (n - 4)) / s4,
        "Sxj": 1,
    })]


def _end_weight(n, b):
    return b ** (n - 2) - b ** (n - 3) + b ** (n - 4)


def _f6(n, b) -> list[Row]:
    c = _end_weight(n, b)
    return [(GE, b ** (n - 2) + b ** (n - 4), {
        "z1i": b ** (n - 4) - b, "z1j": b ** (n - 4) - b,
        "zi1": c, "zj1": c,
        "xij": 1 / b, "xji": 1 / b,
        "Sxi": 1, "Sxj": 1,
    })]


def _f7(n, b) -> list[Row]:
    c = _end_weight(n, b)
    return [(GE, b ** (n - 2) + b ** (n - 4), {
        "z1i": b ** (n - 4) - b,
        "zi1": c, "zj1": c,
        "zji": b ** (n - 4) + b ** (n - 2),
        "xij": 1 / b, "xji": -b,
        "Sxi": 1, "Sxj": 1,
    })]


def _f8(n, b) -> list[Row]:
    c = _end_weight(n, b)
    s5 = geo(b, 0, n - 5)
    return [(GE, b ** (n - 2) + b ** (n - 4), {
        "z1i": b ** (n - 4) - b, "z1j": b ** (n - 4) - b,
        "zi1": c, "zj1": c,
        "zji": b ** (n - 4) * (1 + geo(b, 2, n - 3)) / s5,
        "xij": 1 / b,
        "xji": (1 - b ** (n - 4) - b ** (n - 5)) / s5,
        "Sxi": 1, "Sxj": 1,
    })]


def _f9(n, b) -> list[Row]:
    top = b ** n + b ** (n - 1) + b ** (n - 2) + b ** (n - 3)
    return [(GE, top, {
        "z1i": b ** (n - 3) - b ** 2,
        "zi1": b ** n,
        "zj1": b ** n + b ** (n - 1) + b ** (n - 3),
        "zji": top,
        "xij": 1,
        "Sxi": b,
        "Sxj": b ** 2 + b + 1,
        "xji": -b ** 2,
    })]


def _tail_family(n, b, zji, xji) -> list[Row]:
    """Shared frame of families 10 and 11; only the z_ji and x_ji weights differ."""
    return [(GE, (b ** (n - 1) + b ** (n - 2) + b ** (n - 3)) / (b + 1), {
        "z1i": (b ** (n - 3) - b ** 2) / (b + 1),
        "z1j": b ** (n - 3) - b,
        "zi1": b ** (n - 1) / (b + 1),
        "zj1": (b ** (n - 1) + b ** (n - 3)) / (b + 1),
        "zji": zji,
        "xij": 1 / (b + 1),
        "xji": xji,
        "Sxi": b / (b + 1),
        "Sxj": 1,
    })]


def _f10(n, b) -> list[Row]:
    d = 1 + b ** (n - 3) + 2 * geo(b, 1, n - 4)
    # z_ji weight: the inner sum starts at a = 3 as in the case-analysis
    # table; starting at a = 2 double counts beta^2 and gives a non-facet
    zji = b ** (n - 3) * (1 + b + geo(b, 3, n - 2)) / d
    xji = (1 - b ** (n - 3) + 2 * b + geo(b, 2, n - 5)) / d
    return _tail_family(n, b, zji, xji)


def _f11(n, b) -> list[Row]:
    s4 = geo(b, 0, n - 4)
    odd_z = sum((b ** (2 * a + 1) for a in range(1, n // 2 - 1)), Fraction(0))
    odd_x = sum((b ** (2 * a + 1) for a in range(0, n // 2 - 2)), Fraction(0))
    zji = b ** (n - 3) * (1 + odd_z) / s4
    xji = (1 - b ** (n - 4) + odd_x) / s4
    return _tail_family(n, b, zji, xji)


COEFFICIENTS: dict[int, Callable[[int, Fraction], list[Row]]] = {
    1: _f1, 2: _f2, 3: _f3, 4: _f4, 5: _f5, 6: _f6,
    7: _f7, 8: _f8, 9: _f9, 10: _f10, 11: _f11,
}


def _family(fam) -> Set3Family:
    if isinstance(fam, Set3Family):
        return fam
    try:
        return FAMILIES[int(fam)]
    except KeyError:
        raise ValueError(f"no Set-3 family {fam}; families are 1..11") from None


def family_rows(fam, n: int, beta) -> list[Row]:
    """Symbolic rows of a family at (n, beta), before index expansion."""
    f = _family(fam)
    if n < MIN_N:
        raise NTooSmall(f"Set-3 families need n >= {MIN_N}, got {n}")
    if not f.applies_to(n):
        raise NotApplicable(f"family {f.id} holds only for even n, got n = {n}")
    b = to_rational(beta)
    if not 0 < b < 1:
        raise ValueError("beta must lie strictly between 0 and 1")
    return [(rel, Fraction(rhs), {k: Fraction(v) for k, v in t.items()}) for rel, rhs, t in COEFFICIENTS[f.id](n, b)]


def _expand(sym: str, i, j, n) -> list[tuple[str, int, int]]:
    others = [a for a in range(2, n + 1) if a not in (i, j)]
    if sym == "Sxi":
        return [("x", i, a) for a in others]
    if sym == "Sxj":
        return [("x", j, a) for a in others]
    if sym == "Sxj1":
        return [("x", j, a) for a in range(1, n + 1) if a not in (i, j)]
    if sym == "Sxj_all":
        return [("x", j, a) for a in range(1, n + 1) if a != j]
    kind, a, c = sym[0], sym[1], sym[2]
    node = {"1": 1, "i": i, "j": j}
    return [(kind, node[a], node[c])]


def set3_constraint(fam, i, j: int, n: int, beta, space: TspSpace | None = None) -> list[LinearConstraint]:
    """Rows of one family member in :class:`TspSpace` coordinates.

    Families 1 and 2 are two-sided and give a GE row then an LE row.
    Family 2 depends on j only; ``i`` is ignored there (pass None).
    """
    f = _family(fam)
    rows = family_rows(f, n, beta)
    if f.arity is Arity.PAIR:
        if i is None or not (2 <= i <= n and 2 <= j <= n and i != j):
            raise ValueError(f"need distinct i, j in 2..{n}, got i={i}, j={j}")
    elif not 2 <= j <= n:
        raise ValueError(f"need j in 2..{n}, got {j}")
    sp = space or TspSpace(n)
    b = to_rational(beta)
    out = []
    for rel, rhs, sym in rows:
        terms: dict = {}
        for s, c in sym.items():
            for key in _expand(s, i, j, n):
                terms[key] = terms.get(key, 0) + c
        out.append(sp.constraint(terms, rel, rhs, b))
    return out


def set3_members(n: int, families: Iterable[int] = range(1, 12)) -> list[tuple[int, int | None, int]]:
    """``(family, i, j)`` for every applicable member, sorted; i is None for family 2."""
    out = []
    for k in sorted(families):
        f = _family(k)
        if not f.applies_to(n):
            continue
        if f.arity is Arity.SINGLE:
            out.extend((k, None, j) for j in range(2, n + 1))
        else:
            out.extend((k, i, j) for i in range(2, n + 1) for j in range(2, n + 1) if i != j)
    return out


# -- validation over all tours -----------------------------------------------------

@dataclass(frozen=True)
class Set3Result:
    family: int
    i: int | None
    j: int
    relation: Relation
    valid: bool
    violations: int
    tight_count: int
    face_dim: int | None
    is_facet: bool | None
    min_slack: Fraction

    def verdict(self) -> str:
        if not self.valid:
            return "INVALID"
        if self.is_facet is None:
            return "VALID"
        return "VALID+FACET" if self.is_facet else "VALID+NONFACET"


@dataclass
class Set3Report:
    n: int
    beta: Fraction
    tours: int
    dimension: int
    results: list[Set3Result]
    skipped: dict[int, str] = field(default_factory=dict)

    def family_summary(self) -> dict[int, tuple[int, int, int]]:
        """family -> (rows, valid rows, facet rows)."""
        out: dict[int, list[int]] = {}
        for r in self.results:
            s = out.setdefault(r.family, [0, 0, 0])
            s[0] += 1
            s[1] += r.valid
            s[2] += bool(r.is_facet)
        return {k: tuple(v) for k, v in sorted(out.items())}

    @property
    def all_valid(self) -> bool:
        return all(r.valid for r in self.results)

    @property
    def all_facets(self) -> bool:
        return all(r.is_facet for r in self.results)


class _PointTable:
    """Integer-scaled tour points with per-coordinate columns for fast dot products."""

    def __init__(self, n: int, beta: Fraction):
        self.rows, self.scale = integer_points(n, beta)
        self.cols = np.array(self.rows, dtype=object).T if self.rows else None
        self.ncols = len(self.rows[0])

    def slacks(self, c: LinearConstraint):
        den = reduce(math.lcm, (q.denominator for q in c.coeffs), c.rhs.denominator)
        lhs = np.zeros(len(self.rows), dtype=object)
        for k, q in enumerate(c.coeffs):
            if q:
                lhs = lhs + int(q * den) * self.cols[k]
        rhs = int(c.rhs * den) * self.scale
        return lhs - rhs if c.relation is GE else rhs - lhs, den * self.scale

    def face_dim(self, tight: list[int], upper: int) -> int:
        if not tight:
            return -1
        a = self.rows[tight[0]]
        diffs = [[x - y for x, y in zip(self.rows[t], a)] for t in tight[1:]]
        return certified_rank(diffs, self.ncols, upper=upper)


def tour_polytope_dimension(n: int, beta) -> int:
    """Dimension of the convex hull of all tour points (exact).

    The equality system of TSP_H plus the in-degree rows bounds the
    dimension from above; a modular rank meeting that bound certifies it.
    """
    from .models import indegree_equalities, tsp_h_equalities

    b = to_rational(beta)
    table = _PointTable(n, b)
    sp = TspSpace(n)
    eqs = tsp_h_equalities(n, b, sp) + indegree_equalities(n, sp)
    upper = sp.dim - rank_of_rows([c.coeffs for c in eqs], sp.dim)
    return table.face_dim(list(range(len(table.rows))), upper)


_WORKER: dict = {}


def _init_worker(n, beta, dim, facets):
    _WORKER.update(table=_PointTable(n, beta), n=n, beta=beta, dim=dim, facets=facets, space=TspSpace(n))


def _check_members(members):
    w = _WORKER
    table, n, b, dim, facets, sp = w["table"], w["n"], w["beta"], w["dim"], w["facets"], w["space"]
    total = len(table.rows)
    out = []
    for fam, i, j in members:
        for c in set3_constraint(fam, i, j, n, b, space=sp):
            slack, den = table.slacks(c)
            violations = int(np.count_nonzero(slack < 0))
            tight = [int(t) for t in np.flatnonzero(slack == 0)]
            fd = facet = None
            if facets:
                # a hyperplane missing some tour cuts the hull's affine span
                # down by at least one, so dim - 1 bounds the tight rank
                upper = dim if len(tight) == total else dim - 1
                fd = table.face_dim(tight, upper)
                facet = violations == 0 and fd == dim - 1
            out.append(Set3Result(fam, i, j, c.relation, violations == 0, violations, len(tight),
                                  fd, facet, Fraction(int(min(slack)), den)))
    return out


def validate_set3(n: int, beta, families: Iterable[int] = range(1, 12), *, facets: bool = True,
                  jobs: int = 1) -> Set3Report:
    """Check every applicable family member against all (n-1)! tours, exactly.

    ``facets=False`` skips the face-dimension computation (validity only).
    Results are sorted by family, i, j, then GE before LE.
    """
    if n < MIN_N:
        raise NTooSmall(f"Set-3 families need n >= {MIN_N}, got {n}")
    b = to_rational(beta)
    enumerate_tours(n)  # applies the enumeration guard early
    families = sorted(set(families))
    skipped = {k: f"family {k} holds only for even n" for k in families if not _family(k).applies_to(n)}
    members = set3_members(n, families)
    dim = tour_polytope_dimension(n, b) if facets else -1
    if jobs <= 1 or len(members) < 2:
        _init_worker(n, b, dim, facets)
        results = _check_members(members)
    else:
        chunks = [members[k::jobs] for k in range(jobs)]
        with ProcessPoolExecutor(jobs, initializer=_init_worker, initargs=(n, b, dim, facets)) as ex:
            results = [r for part in ex.map(_check_members, chunks) for r in part]
    order = {GE: 0, LE: 1}
    results.sort(key=lambda r: (r.family, r.i or 0, r.j, order[r.relation]))
    ntours = math.factorial(n - 1)
    return Set3Report(n, b, ntours, dim, results, skipped)


# -- case tables -------------------------------------------------------------------

CASE_VARIABLES = {
    1: ("zij", "zji"),
    6: ("z1i", "z1j", "zi1", "zj1"),
    7: ("z1i", "z1j", "zi1", "zj1"),
    10: ("z1i", "z1j", "zi1", "zj1", "zji"),
}


def case_table(fam: int, n: int, beta, i: int = 2, j: int = 3, variables=None):
    """Min/max of a family's left-hand side over tours, split by binary case.

    Returns ``{pattern: (min, max)}`` for every pattern of ``variables``
    (default: the reference case columns) realised by some
    tour, plus the row's relation and right-hand side.  For family 1 the
    left-hand side is ``sum_{a != i,j} x_ja - beta x_ij`` alone, as in the
    table; otherwise it is the full left-hand side of the (single) row.
    """
    b = to_rational(beta)
    variables = tuple(variables or CASE_VARIABLES[fam])
    rows = family_rows(fam, n, b)
    rel, rhs, sym = rows[0]
    if fam == 1:
        sym = {"Sxj1": Fraction(1), "xij": -b}
    node = {"1": 1, "i": i, "j": j}
    out: dict[tuple[int, ...], list[Fraction]] = {}
    for t in enumerate_tours(n):
        p = tour_to_point(t, b)
        val = Fraction(0)
        for s, c in sym.items():
            for kind, a, d in _expand(s, i, j, n):
                val += c * (p.xv(a, d) if kind == "x" else p.zv(a, d))
        key = tuple(p.zv(node[v[1]], node[v[2]]) for v in variables)
        lo_hi = out.get(key)
        out[key] = [val, val] if lo_hi is None else [min(lo_hi[0], val), max(lo_hi[1], val)]
    return {k: tuple(v) for k, v in sorted(out.items(), reverse=True)}, rel, rhs
