"""H_beta, TSP_H(beta), TSP_H*(beta) and Sherali-Driscoll model generators.

TSP_H variables follow :class:`TspSpace` order (all z_ij, then x_ij for
i, j >= 2), so its constraints live in the same space as the tour points.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from ..errors import InfeasibleRelaxation, NTooSmall
from ..optimizer import INF, MipModel, Mode, Sense, Status, Variable, solve_lp
from ..polytope import ConstraintSystem, LinearConstraint, Relation
from ..ratlinalg import to_rational
from .instance import AtspInstance
from .tours import TourPoint, TspSpace

EQ, GE, LE = Relation.EQ, Relation.GE, Relation.LE


def _beta(beta) -> Fraction:
    b = to_rational(beta)
    if not 0 < b < 1:
        raise ValueError("beta must lie strictly between 0 and 1")
    return b


# -- H_beta on an arbitrary arc set -------------------------------------------

def hbeta_arcs(n: int) -> list[tuple[int, int]]:
    """Variable order of :func:`build_hbeta`: every arc of K_n, row-major."""
    return [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]


def build_hbeta(n: int, beta, arcs: Iterable[tuple[int, int]] | None = None) -> ConstraintSystem:
    """Discounted-flow constraints of a digraph on nodes 1..n.

    The variable space is every arc of K_n (see :func:`hbeta_arcs`); arcs
    outside ``arcs`` get an ``x_ij = 0`` row.  Equalities come first in the
    order: node 1 flow, nodes 2..n flow, unit outflow of node 1, absent arcs.
    """
    b = _beta(beta)
    full = hbeta_arcs(n)
    present = set(full) if arcs is None else {tuple(a) for a in arcs}
    if not present:
        raise ValueError("arc set is empty")
    bad = present - set(full)
    if bad:
        raise ValueError(f"arcs outside K_{n}: {sorted(bad)}")
    col = {a: k for k, a in enumerate(full)}
    m = len(full)

    def row(terms):
        v = [Fraction(0)] * m
        for a, c in terms:
            if a in present:
                v[col[a]] += c
        return v

    eqs = []
    others = range(2, n + 1)
    eqs.append(LinearConstraint(tuple(row([((1, j), 1) for j in others] + [((j, 1), -b) for j in others])), EQ, 1 - b ** n))
    for i in others:
        terms = [((i, j), 1) for j in range(1, n + 1) if j != i]
        terms += [((j, i), -b) for j in range(1, n + 1) if j != i]
        eqs.append(LinearConstraint(tuple(row(terms)), EQ, 0))
    eqs.append(LinearConstraint(tuple(row([((1, j), 1) for j in others])), EQ, 1))
    for a in full:
        if a not in present:
            v = [Fraction(0)] * m
            v[col[a]] = Fraction(1)
            eqs.append(LinearConstraint(tuple(v), EQ, 0))
    ineqs = []
    for a in full:
        if a in present:
            v = [Fraction(0)] * m
            v[col[a]] = Fraction(1)
            ineqs.append(LinearConstraint(tuple(v), GE, 0))
    return ConstraintSystem(m, eqs, ineqs)


def hbeta_point(p: TourPoint) -> tuple[Fraction, ...]:
    """A tour point in :func:`build_hbeta` coordinates."""
    return tuple(p.xv(i, j) for i, j in hbeta_arcs(p.n))


# -- TSP_H ---------------------------------------------------------------------

def tsp_h_equalities(n: int, beta, space: TspSpace | None = None) -> list[LinearConstraint]:
    """The equality rows of TSP_H in :class:`TspSpace` coordinates.

    Flow balance at node 1 and at nodes 2..n, unit outflow of node 1, and
    the out-degree rows; the arc links ``x_1j = z_1j``, ``x_j1 =
    beta^(n-1) z_j1`` are already substituted.
    """
    b = _beta(beta)
    sp = space or TspSpace(n)
    nodes = range(1, n + 1)
    others = range(2, n + 1)
    rows = []
    t = {}
    for j in others:
        t[("x", 1, j)] = 1
        t[("x", j, 1)] = -b
    rows.append(sp.constraint(t, EQ, 1 - b ** n, b))
    for i in others:
        t = {}
        for j in nodes:
            if j != i:
                t[("x", i, j)] = t.get(("x", i, j), 0) + 1
                t[("x", j, i)] = t.get(("x", j, i), 0) - b
        rows.append(sp.constraint(t, EQ, 0, b))
    rows.append(sp.constraint({("x", 1, j): 1 for j in others}, EQ, 1, b))
    rows.extend(outdegree_equalities(n, sp))
    return rows


def outdegree_equalities(n: int, space: TspSpace | None = None) -> list[LinearConstraint]:
    sp = space or TspSpace(n)
    nodes = range(1, n + 1)
    return [sp.constraint({("z", i, j): 1 for j in nodes if j != i}, EQ, 1) for i in nodes]


def indegree_equalities(n: int, space: TspSpace | None = None) -> list[LinearConstraint]:
    """``sum_{i != j} z_ij = 1`` for every node j."""
    sp = space or TspSpace(n)
    nodes = range(1, n + 1)
    return [sp.constraint({("z", i, j): 1 for i in nodes if i != j}, EQ, 1) for j in nodes]


def tsp_h_linking(n: int, beta, space: TspSpace | None = None) -> list[LinearConstraint]:
    """``beta^(n-2) z_ij <= x_ij <= beta z_ij`` for i, j >= 2, as GE/LE pairs."""
    b = _beta(beta)
    sp = space or TspSpace(n)
    rows = []
    for i, j in sp.x_arcs:
        rows.append(sp.constraint({("x", i, j): 1, ("z", i, j): -b ** (n - 2)}, GE, 0, b))
        rows.append(sp.constraint({("x", i, j): 1, ("z", i, j): -b}, LE, 0, b))
    return rows


def _tsp_variables(sp: TspSpace) -> list[Variable]:
    vs = [Variable.binary(f"z{i}_{j}") for i, j in sp.z_arcs]
    vs += [Variable(f"x{i}_{j}", 0, INF) for i, j in sp.x_arcs]
    return vs


def _arc_objective(inst: AtspInstance, sp: TspSpace, width: int) -> list[Fraction]:
    c = [Fraction(0)] * width
    for i, j in sp.z_arcs:
        c[sp.z_index(i, j)] = to_rational(inst.c(i, j))
    return c


def build_tsp_h(inst: AtspInstance, beta, *, indegree: bool = False) -> MipModel:
    """TSP_H(beta): min sum c_ij z_ij over the discounted-flow tour model.

    ``indegree`` appends the in-degree equalities that the equality miner
    finds missing from the base system.
    """
    b = _beta(beta)
    sp = TspSpace(inst.n)
    rows = tsp_h_equalities(inst.n, b, sp) + tsp_h_linking(inst.n, b, sp)
    if indegree:
        rows += indegree_equalities(inst.n, sp)
    return MipModel(tuple(_tsp_variables(sp)), Sense.MIN, tuple(_arc_objective(inst, sp, sp.dim)),
                    tuple(rows), name=f"TSP_H({b})")


def build_tsp_h_star(inst: AtspInstance, beta, *, indegree: bool = True) -> MipModel:
    """TSP_H(beta) strengthened by every member of Set-3 families 1-3.

    In-degree equalities are included by default: the bounds reported for
    the strengthened model are only reproduced with them (see README).
    """
    from .set3 import set3_members, set3_constraint

    if inst.n < 6:
        raise NTooSmall("the Set-3 families need n >= 6")
    b = _beta(beta)
    base = build_tsp_h(inst, b, indegree=indegree)
    sp = TspSpace(inst.n)
    extra = []
    for fam, i, j in set3_members(inst.n, families=(1, 2, 3)):
        extra.extend(set3_constraint(fam, i, j, inst.n, b, space=sp))
    return MipModel(base.variables, base.sense, base.objective, base.constraints + tuple(extra),
                    name=f"TSP_H*({b})")


def tsp_h_solution(inst: AtspInstance, p: TourPoint) -> tuple[Fraction, ...]:
    """Tour point as a TSP_H variable vector."""
    return TspSpace(inst.n).vector(p)


# -- Sherali-Driscoll ------------------------------------------------------------

def build_sd(inst: AtspInstance) -> MipModel:
    """Sherali-Driscoll lifted MTZ model.

    Variables: z_ij for every arc (binary), x_ij >= 0 for i, j >= 2, and a
    free rank variable u_j for j >= 2.  Terms the reference statement
    writes as x_1j, x_j1 are the arc indicators z_1j, z_j1, and the upper
    linking bound is (n-2) z_ij.
    """
    n = inst.n
    if n < 3:
        raise ValueError("n must be at least 3")
    sp = TspSpace(n)
    vs = _tsp_variables(sp)
    u0 = len(vs)
    vs += [Variable.free(f"u{j}") for j in range(2, n + 1)]
    width = len(vs)

    def idx(key):
        kind, *ij = key
        if kind == "z":
            return sp.z_index(*ij)
        if kind == "x":
            return sp.x_index(*ij)
        return u0 + ij[0] - 2

    def row(terms, rel, rhs):
        v = [Fraction(0)] * width
        for key, c in terms.items():
            v[idx(key)] += to_rational(c)
        return LinearConstraint(tuple(v), rel, rhs)

    nodes = range(1, n + 1)
    others = range(2, n + 1)
    rows = []
    for i in others:
        t = {("x", i, j): 1 for j in others if j != i}
        t[("z", i, 1)] = n - 1
        t[("u", i)] = -1
        rows.append(row(t, EQ, 0))
    for j in others:
        t = {("x", i, j): 1 for i in others if i != j}
        t[("u", j)] = -1
        rows.append(row(t, EQ, -1))
    for i in others:
        for j in others:
            if i == j:
                continue
            rows.append(row({("x", i, j): 1, ("z", i, j): -1}, GE, 0))
            rows.append(row({("x", i, j): 1, ("z", i, j): -(n - 2)}, LE, 0))
            # u_j + (n-2) z_ij - (n-1)(1 - z_ji) <= x_ij + x_ji <= u_j - (1 - z_ji)
            rows.append(row({("u", j): 1, ("z", i, j): n - 2, ("z", j, i): n - 1,
                             ("x", i, j): -1, ("x", j, i): -1}, LE, n - 1))
            rows.append(row({("x", i, j): 1, ("x", j, i): 1, ("u", j): -1, ("z", j, i): -1}, LE, -1))
    for j in others:
        # 2 - z_1j + (n-3) z_j1 <= u_j <= (n-2) - (n-3) z_1j + z_j1
        rows.append(row({("u", j): 1, ("z", 1, j): 1, ("z", j, 1): -(n - 3)}, GE, 2))
        rows.append(row({("u", j): 1, ("z", 1, j): n - 3, ("z", j, 1): -1}, LE, n - 2))
    for i in nodes:
        rows.append(row({("z", i, j): 1 for j in nodes if j != i}, EQ, 1))
    for j in nodes:
        rows.append(row({("z", i, j): 1 for i in nodes if i != j}, EQ, 1))
    obj = _arc_objective(inst, sp, width)
    return MipModel(tuple(vs), Sense.MIN, tuple(obj), tuple(rows), name="SD")


def sd_solution(inst: AtspInstance, order) -> tuple[Fraction, ...]:
    """SD variable vector of a tour: z on its arcs, u_j = visit rank, x_ij = u_i z_ij."""
    n = inst.n
    sp = TspSpace(n)
    rank = {v: k for k, v in enumerate(order)}
    z = {(order[k], order[(k + 1) % n]) for k in range(n)}
    v = [Fraction(1 if a in z else 0) for a in sp.z_arcs]
    v += [Fraction(rank[i]) if (i, j) in z else Fraction(0) for i, j in sp.x_arcs]
    v += [Fraction(rank[j]) for j in range(2, n + 1)]
    return tuple(v)


# -- bounds ----------------------------------------------------------------------

def lp_bound(model: MipModel, mode: Mode = Mode.FLOAT) -> float:
    """Optimal value of the LP relaxation (binaries relaxed to [0, 1])."""
    sol = solve_lp(model.relaxed(), mode)
    if sol.status is not Status.OPTIMAL:
        raise InfeasibleRelaxation(f"LP relaxation of {model.name or 'model'} is {sol.status.value}")
    return float(sol.objective)
