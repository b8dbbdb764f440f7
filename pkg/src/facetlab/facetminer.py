"""Iterative facet mining from an explicit solution set.

Each round solves a MIP over (pi, pi0, theta) that maximises the number of
points of S lying on a valid inequality ``pi.x <= pi0``.  Big-M and epsilon
rows tie theta_i = 1 to ``pi.s_i = pi0`` and theta_i = 0 to
``pi.s_i <= pi0 - epsilon``.  Every solution is classified by the dimension
of its tight set, checked for redundancy against the known inequalities and
then cut off with a no-good row over theta, after which the cardinality cap
drops to the objective just found.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import CapTooSmall, InconsistentInput, InfeasibleRelaxation, NodeLimitExceeded, NoNewEquality
from .optimizer import MipModel, Mode, Sense, Status, Variable, solve_lp, solve_mip
from .polytope import (
    ConstraintSystem,
    LinearConstraint,
    Relation,
    VertexSet,
    eca,
    polytope_dimension,
)
from .ratlinalg import IncrementalRank, dot, format_rational, to_rational


class Classification(enum.Enum):
    FACET_NEW = "FACET_NEW"
    FACET_REDUNDANT = "FACET_REDUNDANT"
    FACE = "FACE"
    REJECTED = "REJECTED"


class Redundancy(enum.Enum):
    NEW = "NEW"
    REDUNDANT = "REDUNDANT"


class Termination(enum.Enum):
    MIP_INFEASIBLE = "MIP_INFEASIBLE"
    NODE_BUDGET = "NODE_BUDGET"
    USER_LIMIT = "USER_LIMIT"


@dataclass
class FacetSearchConfig:
    """Knobs of the mining MIP.

    ``face_threshold=None`` means dim(conv S) - 1, i.e. keep facets only.
    ``mask`` lists 0-based coordinates whose pi entry is fixed to zero.
    """

    M: Fraction = Fraction(100)
    epsilon: Fraction = Fraction(1, 100)
    face_threshold: int | None = None
    pi_bound: Fraction = Fraction(1)
    mask: frozenset | None = None
    node_budget: int | None = 200_000
    mode: Mode = Mode.EXACT
    max_iterations: int | None = None

    def __post_init__(self):
        self.M = to_rational(self.M)
        self.epsilon = to_rational(self.epsilon)
        self.pi_bound = to_rational(self.pi_bound)
        if self.mask is not None:
            self.mask = frozenset(self.mask)
        if self.M <= 0:
            raise ValueError("M must be positive")
        if not 0 < self.epsilon < self.M:
            raise ValueError("epsilon must lie in (0, M)")
        if self.pi_bound <= 0:
            raise ValueError("pi_bound must be positive")
        if self.face_threshold is not None and self.face_threshold < 0:
            raise ValueError("face_threshold must be nonnegative")

    @classmethod
    def tsp_preset(cls, **kw) -> "FacetSearchConfig":
        kw.setdefault("epsilon", Fraction(1, 10))
        return cls(**kw)


@dataclass
class MinedInequality:
    """One round of the mining loop.

    ``pi``/``pi0`` are the solver's values in ``pi.x <= pi0`` orientation;
    ``simplified`` is the hull-derived short form for new facets.
    """

    pi: tuple
    pi0: object
    support: frozenset
    face_dim: int
    classification: Classification
    objective: int
    cap: int
    simplified: LinearConstraint | None = None
    valid: bool = True
    support_consistent: bool = True

    @property
    def inequality(self) -> LinearConstraint:
        return LinearConstraint(tuple(to_rational(v) for v in self.pi), Relation.LE, to_rational(self.pi0))

    @property
    def display(self) -> LinearConstraint:
        if self.simplified is not None:
            return self.simplified
        return self.inequality.canonical()


@dataclass
class MiningReport:
    iterations: list[MinedInequality] = field(default_factory=list)
    termination: Termination = Termination.MIP_INFEASIBLE
    final_cap: int = 0
    caps: list[int] = field(default_factory=list)  # constraint (3) RHS of every MIP solved
    n: int = 0
    N: int = 0
    dimension: int = 0
    rank_eq: int = 0
    config: FacetSearchConfig | None = None
    nodes: int = 0

    def by_class(self, cls: Classification) -> list[MinedInequality]:
        return [it for it in self.iterations if it.classification is cls]

    @property
    def new_facets(self) -> list[MinedInequality]:
        return self.by_class(Classification.FACET_NEW)


# -- model pieces -------------------------------------------------------------


def _theta_names(N: int) -> list[str]:
    return [f"theta{i + 1}" for i in range(N)]


def _max_abs(S: VertexSet) -> Fraction:
    return max((abs(v) for p in S.points for v in p), default=Fraction(0))


def big_m_sufficient(S: VertexSet, cfg: FacetSearchConfig) -> bool:
    """Whether M dominates every slack pi0 - pi.s allowed by the boxes."""
    mx = _max_abs(S) or Fraction(1)
    return cfg.M >= 2 * cfg.pi_bound * S.n * mx


def build_facet_mip(S: VertexSet, m: int, cfg: FacetSearchConfig, cap: int,
                    cuts: Sequence[LinearConstraint] = ()) -> MipModel:
    """The mining MIP; variable order is pi_1..pi_n, pi0, theta_1..theta_N."""
    n, N = S.n, S.N
    need = n - m
    if cap < need:
        raise CapTooSmall(f"cap {cap} is below the {need} tight points a proper face needs")
    if cap > N - 1:
        raise ValueError("cap may not exceed N - 1")
    pb = cfg.pi_bound
    mask = cfg.mask or frozenset()
    mx = _max_abs(S) or Fraction(1)
    b0 = pb * n * mx
    vs = []
    for k in range(n):
        if k in mask:
            vs.append(Variable(f"pi{k + 1}", 0, 0))
        else:
            vs.append(Variable(f"pi{k + 1}", -pb, pb))
    vs.append(Variable("pi0", -b0, b0))
    vs.extend(Variable.binary(t) for t in _theta_names(N))
    width = n + 1 + N
    M, eps = cfg.M, cfg.epsilon
    rows = []
    for i, s in enumerate(S.points):
        # -pi.s + pi0 + M theta_i <= M
        c = [-v for v in s] + [Fraction(1)] + [Fraction(0)] * N
        c[n + 1 + i] = M
        rows.append(LinearConstraint(tuple(c), Relation.LE, M))
        # pi.s - pi0 - eps theta_i <= -eps
        c = list(s) + [Fraction(-1)] + [Fraction(0)] * N
        c[n + 1 + i] = -eps
        rows.append(LinearConstraint(tuple(c), Relation.LE, -eps))
    ones = [Fraction(0)] * (n + 1) + [Fraction(1)] * N
    rows.append(LinearConstraint(tuple(ones), Relation.LE, cap))
    rows.append(LinearConstraint(tuple(ones), Relation.GE, need))
    for cut in cuts:
        if cut.n == N:
            cut = LinearConstraint((Fraction(0),) * (n + 1) + cut.coeffs, cut.relation, cut.rhs)
        elif cut.n != width:
            raise ValueError("cut width matches neither the theta block nor the full model")
        rows.append(cut)
    obj = [Fraction(0)] * (n + 1) + [Fraction(1)] * N
    return MipModel(tuple(vs), Sense.MAX, tuple(obj), tuple(rows), name="facet-mip")


def dedup_cut(theta: Sequence) -> LinearConstraint:
    """No-good row over theta excluding exactly the assignment ``theta``."""
    t = [int(v) for v in theta]
    if any(v not in (0, 1) for v in t):
        raise ValueError("theta must be a 0/1 vector")
    coeffs = tuple(Fraction(1 if v else -1) for v in t)
    return LinearConstraint(coeffs, Relation.LE, Fraction(sum(t) - 1))


def theta_of(S: VertexSet, ineq: LinearConstraint) -> list[int]:
    return [1 if ineq.is_tight(p) else 0 for p in S.points]


def dedup_cuts_for_existing(B0, S: VertexSet) -> list[LinearConstraint]:
    rows = B0.inequalities if isinstance(B0, ConstraintSystem) else list(B0 or [])
    return [dedup_cut(theta_of(S, c)) for c in rows]


def classify_face(S_F: VertexSet, Atilde_rank: int, n: int) -> tuple[int, bool]:
    d = polytope_dimension(S_F)
    return d, d == n - Atilde_rank - 1


def _as_rows(system) -> list[LinearConstraint]:
    if system is None:
        return []
    if isinstance(system, ConstraintSystem):
        return system.all()
    return list(system)


def redundancy_check(ineq: LinearConstraint, eqs, B0, mode: Mode = Mode.EXACT) -> Redundancy:
    """Maximise the inequality's left side over the known system."""
    pi, pi0 = ineq.as_le()
    rows = _as_rows(eqs) + _as_rows(B0)
    n = len(pi)
    vs = tuple(Variable.free(f"x{k + 1}") for k in range(n))
    model = MipModel(vs, Sense.MAX, pi, tuple(rows), name="redundancy")
    sol = solve_lp(model, mode)
    if sol.status is Status.INFEASIBLE:
        raise InfeasibleRelaxation("the known constraint system has no feasible point")
    if sol.status is Status.UNBOUNDED:
        return Redundancy.NEW
    z = sol.objective
    if mode is Mode.EXACT:
        return Redundancy.REDUNDANT if z <= pi0 else Redundancy.NEW
    return Redundancy.REDUNDANT if z <= float(pi0) + 1e-9 * max(1.0, abs(float(pi0))) else Redundancy.NEW


def simplify_inequality(S_F: VertexSet, S: VertexSet, eqs) -> LinearConstraint:
    """Short form of the face spanned by ``S_F``, oriented to hold on all of S.

    Runs the equality-discovery step on S_F with ``eqs`` as the known
    system and keeps the first row it returns.
    """
    eq_rows = [c for c in _as_rows(eqs) if c.relation is Relation.EQ]
    res = eca(S_F, eq_rows)
    if not res.equalities:
        raise NoNewEquality("the support spans no hyperplane beyond the known equalities")
    row = res.equalities[0]
    s0 = next((p for p in S.points if row.lhs(p) != row.rhs), None)
    if s0 is None:
        raise NoNewEquality("the support is all of S, not a proper face")
    v = row.lhs(s0)
    rel = Relation.LE if v < row.rhs else Relation.GE
    return LinearConstraint(row.coeffs, rel, row.rhs)


def equality_rank(eqs, n: int) -> int:
    acc = IncrementalRank(n)
    for c in _as_rows(eqs):
        if c.relation is Relation.EQ:
            acc.add(c.coeffs)
    return acc.rank


# -- the loop -----------------------------------------------------------------


def mine(S: VertexSet, eqs, B0=None, cfg: FacetSearchConfig | None = None, on_iteration=None) -> MiningReport:
    """Run the mining loop until the MIP becomes infeasible or a limit hits.

    ``eqs`` must be the complete equality system of conv(S) (run
    :func:`facetlab.polytope.eca` first).  ``on_iteration`` is called with
    each :class:`MinedInequality` as soon as it is classified.
    """
    cfg = cfg or FacetSearchConfig()
    n, N = S.n, S.N
    eq_rows = [c for c in _as_rows(eqs) if c.relation is Relation.EQ]
    known = [c for c in _as_rows(B0) if c.relation is not Relation.EQ]
    for k, p in enumerate(S.points):
        for c in eq_rows + known:
            if not c.is_satisfied(p):
                raise InconsistentInput(f"point {k + 1} violates known constraint {c.to_lin()}")
    m = equality_rank(eq_rows, n)
    dim = polytope_dimension(S)
    if m != n - dim:
        raise InconsistentInput(
            f"equality system has rank {m} but conv(S) needs {n - dim}; run eca first")
    threshold = dim - 1 if cfg.face_threshold is None else cfg.face_threshold
    report = MiningReport(n=n, N=N, dimension=dim, rank_eq=m, config=cfg)
    cuts = dedup_cuts_for_existing(known, S)
    working_known = list(known)
    cap = N - 1
    exact = cfg.mode is Mode.EXACT
    while True:
        if cfg.max_iterations is not None and len(report.iterations) >= cfg.max_iterations:
            report.termination = Termination.USER_LIMIT
            break
        if cap < n - m:
            report.termination = Termination.MIP_INFEASIBLE
            break
        model = build_facet_mip(S, m, cfg, cap, cuts)
        report.caps.append(cap)
        budget = None
        if cfg.node_budget is not None:
            budget = max(1, cfg.node_budget - report.nodes)
        try:
            sol = solve_mip(model, cfg.mode, node_budget=budget)
        except NodeLimitExceeded as exc:
            report.nodes += exc.nodes
            report.termination = Termination.NODE_BUDGET
            break
        report.nodes += sol.nodes
        if sol.status is not Status.OPTIMAL:
            report.termination = Termination.MIP_INFEASIBLE
            break
        x = sol.x
        theta = [int(round(float(v))) for v in x[n + 1:]]
        pi = tuple(to_rational(v) if exact else to_rational(float(v)) for v in x[:n])
        pi0 = to_rational(x[n]) if exact else to_rational(float(x[n]))
        support = frozenset(i + 1 for i, t in enumerate(theta) if t)
        z = len(support)
        ineq = LinearConstraint(pi, Relation.LE, pi0) if any(pi) else None
        valid = ineq is not None and all(dot(pi, p) <= pi0 for p in S.points)
        consistent = ineq is not None and all((dot(pi, p) == pi0) == (i + 1 in support) for i, p in enumerate(S.points))
        S_F = S.subset(support)
        face_dim, is_facet = classify_face(S_F, m, n)
        simplified = None
        if is_facet:
            try:
                simplified = simplify_inequality(S_F, S, eq_rows)
            except NoNewEquality:
                simplified = None
            target = simplified if simplified is not None else ineq
            red = redundancy_check(target, eq_rows, working_known, Mode.EXACT)
            if red is Redundancy.NEW:
                cls = Classification.FACET_NEW
                working_known.append(target)
            else:
                cls = Classification.FACET_REDUNDANT
                simplified = None
        elif face_dim >= threshold and ineq is not None:
            red = redundancy_check(ineq, eq_rows, working_known, Mode.EXACT)
            cls = Classification.FACE if red is Redundancy.NEW else Classification.REJECTED
            if cls is Classification.FACE:
                working_known.append(ineq)
        else:
            cls = Classification.REJECTED
        item = MinedInequality(pi, pi0, support, face_dim, cls, z, cap, simplified, valid, consistent)
        report.iterations.append(item)
        if on_iteration is not None:
            on_iteration(item)
        cuts = list(cuts) + [dedup_cut(theta)]
        cap = z
    report.final_cap = cap
    return report


# -- reporting ----------------------------------------------------------------


def format_header(report: MiningReport, S: VertexSet | None = None) -> str:
    cfg = report.config or FacetSearchConfig()
    thr = report.dimension - 1 if cfg.face_threshold is None else cfg.face_threshold
    mask = "none" if not cfg.mask else ",".join(str(k + 1) for k in sorted(cfg.mask))
    parts = [
        f"n={report.n}", f"N={report.N}", f"dim={report.dimension}",
        f"M={format_rational(cfg.M)}", f"epsilon={format_rational(cfg.epsilon)}",
        f"pi_bound={format_rational(cfg.pi_bound)}", f"face_threshold={thr}",
        f"mask={mask}", f"mode={cfg.mode.value}",
    ]
    if S is not None:
        parts.append("big_m_ok=" + ("yes" if big_m_sufficient(S, cfg) else "no"))
    return "MINE " + " ".join(parts)


def format_iteration(k: int, it: MinedInequality) -> str:
    sup = ",".join(str(v) for v in sorted(it.support))
    return (f"ITER {k} {it.classification.value} dim={it.face_dim} z={it.objective} cap={it.cap} "
            f"support={{{sup}}} ineq=\"{it.display.to_lin()}\"")


def format_report(report: MiningReport, S: VertexSet | None = None) -> str:
    lines = [format_header(report, S)]
    lines.extend(format_iteration(k, it) for k, it in enumerate(report.iterations, start=1))
    lines.append(f"TERM {report.termination.value}")
    return "\n".join(lines) + "\n"


# -- exhaustive reference -----------------------------------------------------


def brute_force_facets(S: VertexSet, eqs=None) -> set[frozenset]:
    """Tight sets of all facets of conv(S) by subset enumeration.

    Every facet contains ``dim`` affinely independent points, so it is
    enough to try each such subset, take the hyperplane it spans inside the
    affine hull and keep it when all of S lies on one side.
    """
    dim = polytope_dimension(S)
    if dim == 0:
        return set()
    eq_rows = [c for c in _as_rows(eqs) if c.relation is Relation.EQ] if eqs is not None else None
    if eq_rows is None:
        eq_rows = list(eca(S).equalities)
    facets: set[frozenset] = set()
    for combo in itertools.combinations(range(S.N), dim):
        sub = S.subset([k + 1 for k in combo])
        if polytope_dimension(sub) != dim - 1:
            continue
        try:
            h = simplify_inequality(sub, S, eq_rows)
        except NoNewEquality:
            continue
        if not all(h.is_satisfied(p) for p in S.points):
            continue
        facets.add(frozenset(S.tight_labels(h)))
    return facets
