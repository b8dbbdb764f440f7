"""Problem containers for the LP/MIP solvers."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

from ..errors import ParseError
from ..polytope import LinearConstraint, Relation, parse_constraint
from ..ratlinalg import dot, format_rational, to_rational


class Integrality(enum.Enum):
    CONTINUOUS = "C"
    BINARY = "B"


class Sense(enum.Enum):
    MIN = "MIN"
    MAX = "MAX"


class Status(enum.Enum):
    OPTIMAL = "OPTIMAL"
    INFEASIBLE = "INFEASIBLE"
    UNBOUNDED = "UNBOUNDED"


class Mode(enum.Enum):
    EXACT = "EXACT"
    FLOAT = "FLOAT"


INF = float("inf")


def _bound(v, default):
    if v is None:
        return default
    if isinstance(v, float) and v in (INF, -INF):
        return v
    return to_rational(v)


@dataclass(frozen=True)
class Variable:
    """A decision variable; ``lower``/``upper`` may be -inf/+inf."""

    name: str
    lower: object = Fraction(0)
    upper: object = INF
    integrality: Integrality = Integrality.CONTINUOUS

    def __post_init__(self):
        lo = _bound(self.lower, -INF)
        hi = _bound(self.upper, INF)
        if self.integrality is Integrality.BINARY:
            lo = Fraction(0) if lo == -INF else lo
            hi = Fraction(1) if hi == INF else hi
            if lo < 0 or hi > 1:
                raise ValueError(f"binary variable {self.name} has bounds outside [0, 1]")
        if lo > hi:
            raise ValueError(f"variable {self.name} has lower > upper")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def binary(cls, name: str) -> "Variable":
        return cls(name, 0, 1, Integrality.BINARY)

    @classmethod
    def free(cls, name: str) -> "Variable":
        return cls(name, -INF, INF)

    @property
    def is_binary(self) -> bool:
        return self.integrality is Integrality.BINARY

    @property
    def is_fixed(self) -> bool:
        return self.lower == self.upper


@dataclass(frozen=True)
class MipModel:
    """min/max c.x subject to linear constraints and variable bounds."""

    variables: tuple[Variable, ...]
    sense: Sense
    objective: tuple[Fraction, ...]
    constraints: tuple[LinearConstraint, ...] = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "objective", tuple(to_rational(c) for c in self.objective))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        n = len(self.variables)
        if len(self.objective) != n:
            raise ValueError("objective width does not match variable count")
        for c in self.constraints:
            if c.n != n:
                raise ValueError("constraint width does not match variable count")

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def binaries(self) -> list[int]:
        return [k for k, v in enumerate(self.variables) if v.is_binary]

    def index(self, name: str) -> int:
        for k, v in enumerate(self.variables):
            if v.name == name:
                return k
        raise KeyError(name)

    def relaxed(self) -> "MipModel":
        """Copy with every BINARY variable turned into a continuous [0,1] one."""
        vs = tuple(
            Variable(v.name, v.lower, v.upper) if v.is_binary else v for v in self.variables
        )
        return replace(self, variables=vs)

    def with_constraints(self, extra: Iterable[LinearConstraint]) -> "MipModel":
        return replace(self, constraints=self.constraints + tuple(extra))

    def with_bounds(self, bounds: dict[int, tuple]) -> "MipModel":
        vs = list(self.variables)
        for k, (lo, hi) in bounds.items():
            vs[k] = replace(vs[k], lower=lo, upper=hi)
        return replace(self, variables=tuple(vs))

    def objective_value(self, x: Sequence) -> Fraction:
        return dot(self.objective, [to_rational(v) for v in x])

    def is_feasible(self, x: Sequence, tol=0) -> bool:
        """Check bounds, constraints and integrality of ``x``.

        ``tol = 0`` means exact checking on rational ``x``.
        """
        if tol:
            xs = [float(v) for v in x]
            for v, val in zip(self.variables, xs):
                if val < float(v.lower) - tol or val > float(v.upper) + tol:
                    return False
                if v.is_binary and min(abs(val), abs(val - 1)) > tol:
                    return False
            for c in self.constraints:
                lhs = sum(float(a) * b for a, b in zip(c.coeffs, xs) if a)
                r = float(c.rhs)
                scale = max(1.0, abs(r))
                if c.relation is Relation.LE and lhs > r + tol * scale:
                    return False
                if c.relation is Relation.GE and lhs < r - tol * scale:
                    return False
                if c.relation is Relation.EQ and abs(lhs - r) > tol * scale:
                    return False
            return True
        xs = [to_rational(v) for v in x]
        for v, val in zip(self.variables, xs):
            if val < v.lower or val > v.upper:
                return False
            if v.is_binary and val not in (0, 1):
                return False
        return all(c.is_satisfied(xs) for c in self.constraints)

    # -- text format ---------------------------------------------------------

    def to_text(self) -> str:
        out = [f"VARS {self.n}"]
        for v in self.variables:
            out.append(f"{v.name} {_fmt_bound(v.lower)} {_fmt_bound(v.upper)} {v.integrality.value}")
        out.append("OBJ " + self.sense.value + " " + " ".join(format_rational(c) for c in self.objective))
        out.extend(c.to_lin() for c in self.constraints)
        return "\n".join(out) + "\n"

    @classmethod
    def from_text(cls, text: str, name: str = "") -> "MipModel":
        lines = [(k, s.strip()) for k, s in enumerate(text.splitlines(), 1) if s.strip() and not s.lstrip().startswith("#")]
        if not lines or not lines[0][1].startswith("VARS"):
            raise ParseError("model text must start with 'VARS k'", lines[0][0] if lines else 1)
        k0, head = lines[0]
        try:
            nv = int(head.split()[1])
        except (IndexError, ValueError) as exc:
            raise ParseError("bad VARS header", k0) from exc
        vs = []
        for k, s in lines[1 : 1 + nv]:
            toks = s.split()
            if len(toks) != 4 or toks[3] not in ("C", "B"):
                raise ParseError("variable line must be 'name lower upper C|B'", k)
            try:
                vs.append(Variable(toks[0], _parse_bound(toks[1]), _parse_bound(toks[2]), Integrality(toks[3])))
            except ValueError as exc:
                raise ParseError(str(exc), k) from exc
        if len(vs) != nv or len(lines) < 2 + nv:
            raise ParseError("truncated model text", lines[-1][0])
        k, s = lines[1 + nv]
        toks = s.split()
        if toks[0] != "OBJ" or len(toks) != 2 + nv or toks[1] not in ("MIN", "MAX"):
            raise ParseError("objective line must be 'OBJ MIN|MAX c1 ... cn'", k)
        obj = [to_rational(t) for t in toks[2:]]
        cons = [parse_constraint(s, nv, k) for k, s in lines[2 + nv :]]
        return cls(tuple(vs), Sense(toks[1]), tuple(obj), tuple(cons), name)


def _fmt_bound(b) -> str:
    if b == INF:
        return "inf"
    if b == -INF:
        return "-inf"
    return format_rational(b)


def _parse_bound(tok: str):
    if tok in ("inf", "+inf"):
        return INF
    if tok == "-inf":
        return -INF
    return to_rational(tok)


@dataclass
class LpSolution:
    """Solver result.  ``x`` holds Fractions in EXACT mode and floats in FLOAT mode."""

    status: Status
    x: tuple = ()
    objective: object = None
    mode: Mode = Mode.EXACT
    dual: tuple | None = None
    nodes: int = 0
    iterations: int = 0
    info: dict = field(default_factory=dict)

    @property
    def is_optimal(self) -> bool:
        return self.status is Status.OPTIMAL
