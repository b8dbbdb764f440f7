"""Tours, their discounted-flow points, and the (z, x) coordinate space.

A tour starting at node 1 maps to the point with ``z_ij = 1`` on its arcs
and ``x_ij = beta**(k-1)`` on the arc leaving the k-th visited node.  The
coordinate space used for mining and validation keeps every ``z_ij`` but
only the ``x_ij`` with ``i, j >= 2``: arcs touching node 1 are substituted
through ``x_1j = z_1j`` and ``x_j1 = beta**(n-1) z_j1``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from typing import Mapping

from ..errors import TooLarge
from ..polytope import LinearConstraint, Relation, VertexSet
from ..ratlinalg import to_rational

MAX_TOUR_NODES = 9


@dataclass(frozen=True)
class Tour:
    """A Hamiltonian cycle written as its visiting order, starting at node 1."""

    order: tuple[int, ...]

    def __post_init__(self):
        order = tuple(int(v) for v in self.order)
        if not order or order[0] != 1:
            raise ValueError("a tour must start at node 1")
        if sorted(order) != list(range(1, len(order) + 1)):
            raise ValueError("a tour must visit every node 1..n exactly once")
        object.__setattr__(self, "order", order)

    @property
    def n(self) -> int:
        return len(self.order)

    def arcs(self) -> list[tuple[int, int]]:
        o = self.order
        return [(o[k], o[(k + 1) % len(o)]) for k in range(len(o))]

    def __str__(self) -> str:
        return "->".join(map(str, self.order + (1,)))


@dataclass(frozen=True)
class TourPoint:
    """Sparse (x, z) values of a tour; absent arcs are 0."""

    n: int
    beta: Fraction
    x: Mapping[tuple[int, int], Fraction]
    z: Mapping[tuple[int, int], int]

    def xv(self, i: int, j: int) -> Fraction:
        return self.x.get((i, j), Fraction(0))

    def zv(self, i: int, j: int) -> int:
        return self.z.get((i, j), 0)


def enumerate_tours(n: int) -> list[Tour]:
    """All (n-1)! tours anchored at node 1, in lexicographic order."""
    if n < 3:
        raise ValueError("tours need at least 3 nodes")
    if n > MAX_TOUR_NODES:
        raise TooLarge(f"n = {n} gives {math.factorial(n - 1)} tours; the guard is n <= {MAX_TOUR_NODES}")
    return [Tour((1,) + p) for p in itertools.permutations(range(2, n + 1))]


def tour_to_point(t: Tour, beta) -> TourPoint:
    beta = to_rational(beta)
    if not 0 < beta < 1:
        raise ValueError("beta must lie strictly between 0 and 1")
    x, z = {}, {}
    for k, arc in enumerate(t.arcs()):
        x[arc] = beta ** k
        z[arc] = 1
    return TourPoint(t.n, beta, x, z)


class TspSpace:
    """Coordinates: every ``z_ij`` (i != j) row-major, then ``x_ij`` for i, j >= 2."""

    def __init__(self, n: int):
        if n < 3:
            raise ValueError("n must be at least 3")
        self.n = n
        nodes = range(1, n + 1)
        self.z_arcs = [(i, j) for i in nodes for j in nodes if i != j]
        self.x_arcs = [(i, j) for i in nodes for j in nodes if i != j and i >= 2 and j >= 2]
        self._z = {a: k for k, a in enumerate(self.z_arcs)}
        off = len(self.z_arcs)
        self._x = {a: off + k for k, a in enumerate(self.x_arcs)}

    @property
    def dim(self) -> int:
        return len(self.z_arcs) + len(self.x_arcs)

    def z_index(self, i: int, j: int) -> int:
        return self._z[(i, j)]

    def x_index(self, i: int, j: int) -> int:
        return self._x[(i, j)]

    @cached_property
    def names(self) -> list[str]:
        return [f"z{i}_{j}" for i, j in self.z_arcs] + [f"x{i}_{j}" for i, j in self.x_arcs]

    def vector(self, p: TourPoint) -> tuple[Fraction, ...]:
        v = [Fraction(p.zv(i, j)) for i, j in self.z_arcs]
        v += [p.xv(i, j) for i, j in self.x_arcs]
        return tuple(v)

    def coefficients(self, terms: Mapping[tuple[str, int, int], object], beta=None) -> list[Fraction]:
        """Dense coefficient vector of ``sum c * var`` over symbolic arc variables.

        Keys are ``('z', i, j)`` or ``('x', i, j)`` for any arc; x-arcs that
        touch node 1 are substituted (which needs ``beta`` for ``x_j1``).
        """
        out = [Fraction(0)] * self.dim
        for (kind, i, j), c in terms.items():
            c = to_rational(c)
            if kind == "z":
                out[self._z[(i, j)]] += c
            elif kind != "x":
                raise KeyError(kind)
            elif i == 1:
                out[self._z[(1, j)]] += c
            elif j == 1:
                if beta is None:
                    raise ValueError("substituting x_j1 needs beta")
                out[self._z[(i, 1)]] += c * to_rational(beta) ** (self.n - 1)
            else:
                out[self._x[(i, j)]] += c
        return out

    def constraint(self, terms, relation: Relation, rhs, beta=None) -> LinearConstraint:
        return LinearConstraint(tuple(self.coefficients(terms, beta)), relation, rhs)

    def template_coordinates(self, i: int = 2, j: int = 3) -> list[int]:
        """0-based coordinates kept by the symmetry-breaking template.

        z-arcs touching node 1, i or j, and x-arcs touching i or j.
        """
        keep = {1, i, j}
        idx = [self._z[a] for a in self.z_arcs if keep & set(a)]
        idx += [self._x[a] for a in self.x_arcs if {i, j} & set(a)]
        return sorted(idx)

    def symmetry_mask(self, i: int = 2, j: int = 3) -> frozenset[int]:
        """Coordinates whose coefficient the template fixes to zero (a mining mask)."""
        return frozenset(range(self.dim)) - set(self.template_coordinates(i, j))


def tour_vertex_set(n: int, beta) -> VertexSet:
    """The tour points of K_n in :class:`TspSpace` coordinates, tour order."""
    space = TspSpace(n)
    return VertexSet([space.vector(tour_to_point(t, beta)) for t in enumerate_tours(n)], space.dim)


def integer_points(n: int, beta) -> tuple[list[list[int]], int]:
    """Tour points scaled to integers; returns ``(rows, scale)``."""
    space = TspSpace(n)
    vecs = [space.vector(tour_to_point(t, beta)) for t in enumerate_tours(n)]
    scale = reduce(math.lcm, (v.denominator for vec in vecs for v in vec), 1)
    return [[int(v * scale) for v in vec] for vec in vecs], scale

