"""Branch-and-bound for models whose integer variables are all binary."""

from __future__ import annotations

import heapq
import itertools
import math
from fractions import Fraction

from ..errors import NodeLimitExceeded
from .model import LpSolution, MipModel, Mode, Status
from .simplex import _solution_from_engine, make_engine

INT_TOL = 1e-6
DEFAULT_NODE_BUDGET = 200_000


def _integral_objective(model: MipModel) -> bool:
    """True when every feasible integral point has an integer objective."""
    for v, c in zip(model.variables, model.objective):
        if c == 0:
            continue
        if not v.is_binary and not v.is_fixed:
            return False
        if v.is_binary and c.denominator != 1:
            return False
        if v.is_fixed and (c * v.lower).denominator != 1:
            return False
    return True


def _fractionality(val, exact: bool) -> float:
    if exact:
        f = val - math.floor(val)
        return float(min(f, 1 - f))
    return min(val - math.floor(val), math.ceil(val) - val)


def solve_mip(model: MipModel, mode: Mode = Mode.EXACT, node_budget: int | None = DEFAULT_NODE_BUDGET,
              int_tol: float = INT_TOL) -> LpSolution:
    """Optimise ``model`` honouring its BINARY variables.

    Best-bound node selection, most-fractional branching with ties broken
    towards the lowest variable index.  Children are re-optimised from
    their parent's basis with the dual simplex.  ``node_budget`` counts LP
    solves; exceeding it raises :class:`NodeLimitExceeded` carrying the
    incumbent found so far.
    """
    exact = mode is Mode.EXACT
    binaries = model.binaries
    relaxed = model.relaxed()
    eng = make_engine(relaxed, mode)
    status = eng.run()
    if not exact and status is Status.OPTIMAL:
        status = eng.remove_perturbation()
    nodes = 1
    if status is not Status.OPTIMAL:
        return LpSolution(status, mode=mode, nodes=nodes, iterations=eng.iterations)

    round_bound = _integral_objective(model)
    tol = 0 if exact else int_tol

    def node_key(value):
        # engine values are minimisation values
        if round_bound:
            return math.ceil(value - tol) if not exact else math.ceil(value)
        return value

    best_val = None
    best_sol = None
    counter = itertools.count()
    heap = []

    def evaluate():
        """Inspect the engine's current LP optimum; return children if any."""
        nonlocal best_val, best_sol
        val = eng.objective_value()
        key = node_key(val)
        if best_val is not None and key >= best_val - (0 if exact else tol):
            return None
        xs = eng.structural_x()
        pick, pick_frac = None, None
        for k in binaries:
            f = _fractionality(xs[k], exact)
            if f > (0 if exact else int_tol):
                score = abs(float(xs[k]) - 0.5)
                if pick is None or score < pick_frac:
                    pick, pick_frac = k, score
        if pick is None:
            sol = _solution_from_engine(eng, relaxed, mode, Status.OPTIMAL)
            x = list(sol.x)
            for k in binaries:
                x[k] = Fraction(round(x[k])) if exact else float(round(x[k]))
            sol.x = tuple(x)
            sol.objective = model.objective_value(x) if exact else float(
                sum(float(c) * v for c, v in zip(model.objective, x)))
            best_val, best_sol = (val if not round_bound else node_key(val)), sol
            return None
        return key, pick

    res = evaluate()
    if res is not None:
        key, k = res
        snap = eng.snapshot()
        for v in (0, 1):
            heapq.heappush(heap, (key, next(counter), snap, k, v))

    while heap:
        key, _, snap, k, v = heapq.heappop(heap)
        if best_val is not None and key >= best_val - (0 if exact else tol):
            continue
        if node_budget is not None and nodes >= node_budget:
            raise NodeLimitExceeded(
                f"node budget {node_budget} exhausted", incumbent=best_sol, nodes=nodes)
        nodes += 1
        eng.restore(snap)
        val = Fraction(v) if exact else float(v)
        eng.set_bound(k, val, val)
        st = eng.dual()
        if st is not Status.OPTIMAL:
            continue
        res = evaluate()
        if res is None:
            continue
        ckey, ck = res
        csnap = eng.snapshot()
        for cv in (0, 1):
            heapq.heappush(heap, (ckey, next(counter), csnap, ck, cv))

    if best_sol is None:
        return LpSolution(Status.INFEASIBLE, mode=mode, nodes=nodes, iterations=eng.iterations)
    best_sol.nodes = nodes
    best_sol.iterations = eng.iterations
    return best_sol
