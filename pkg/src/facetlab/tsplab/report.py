"""Text reports: bound tables, BOUND lines, Set-3 verdicts and case tables."""

from __future__ import annotations

import time
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction

from ..ratlinalg import format_rational, to_rational
from .instance import AtspInstance
from .models import build_sd, build_tsp_h, build_tsp_h_star, lp_bound
from .set3 import Set3Report

MODELS = ("tsp_h", "tsp_h_star", "sd")
_LABEL = {"tsp_h": "TSP_H", "tsp_h_star": "TSP_H*", "sd": "SD"}


def format_beta(beta) -> str:
    """Decimal form when it terminates (999/1000 -> 0.999), else a fraction."""
    b = to_rational(beta)
    d = b.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    if d != 1:
        return format_rational(b)
    with localcontext() as ctx:
        ctx.prec = 50
        s = format(Decimal(b.numerator) / Decimal(b.denominator), "f")
    return s.rstrip("0").rstrip(".") if "." in s else s


@dataclass(frozen=True)
class BoundRow:
    instance: str
    model: str          # one of MODELS
    beta: Fraction | None
    value: float
    seconds: float = 0.0

    @property
    def label(self) -> str:
        lab = _LABEL[self.model]
        return lab if self.beta is None else f"{lab}({format_beta(self.beta)})"

    def line(self) -> str:
        beta = "-" if self.beta is None else format_beta(self.beta)
        return f"BOUND {self.instance} {_LABEL[self.model]} {beta} {self.value:.4f}"


def compute_bound(inst: AtspInstance, model: str, beta=None) -> BoundRow:
    t0 = time.perf_counter()
    if model == "sd":
        m, beta = build_sd(inst), None
    elif model == "tsp_h":
        m = build_tsp_h(inst, beta)
    elif model == "tsp_h_star":
        m = build_tsp_h_star(inst, beta)
    else:
        raise ValueError(f"unknown model {model!r}; choose from {', '.join(MODELS)}")
    value = lp_bound(m)
    b = None if beta is None else to_rational(beta)
    return BoundRow(inst.name, model, b, value, time.perf_counter() - t0)


def format_bound_table(rows: list[BoundRow]) -> str:
    """Aligned table: one line per instance, one column per model/beta."""
    cols: list[str] = []
    table: dict[str, dict[str, float]] = {}
    for r in rows:
        if r.label not in cols:
            cols.append(r.label)
        table.setdefault(r.instance, {})[r.label] = r.value
    head = ["Problem"] + cols
    body = [[name] + [f"{vals[c]:.4f}" if c in vals else "-" for c in cols] for name, vals in table.items()]
    widths = [max(len(x) for x in col) for col in zip(head, *body)]
    fmt = lambda cells: "  ".join(c.ljust(w) if k == 0 else c.rjust(w) for k, (c, w) in enumerate(zip(cells, widths)))
    return "\n".join([fmt(head)] + [fmt(b) for b in body]) + "\n"


def format_set3_report(rep: Set3Report, detail: bool = False) -> str:
    lines = [f"SET3 n={rep.n} beta={format_beta(rep.beta)} tours={rep.tours} "
             f"dim={rep.dimension if rep.dimension >= 0 else 'skipped'}"]
    if detail:
        for r in rep.results:
            idx = f"j={r.j}" if r.i is None else f"i={r.i} j={r.j}"
            fd = "-" if r.face_dim is None else str(r.face_dim)
            lines.append(f"ROW family={r.family} {idx} {r.relation.value} {r.verdict()} "
                         f"violations={r.violations} tight={r.tight_count} face_dim={fd} "
                         f"min_slack={format_rational(r.min_slack)}")
    for fam, (rows, valid, facet) in rep.family_summary().items():
        members = [r for r in rep.results if r.family == fam]
        if valid < rows:
            verdict = "INVALID"
        elif members[0].is_facet is None:
            verdict = "VALID"
        else:
            verdict = "VALID+FACET" if facet == rows else "VALID+NONFACET"
        lines.append(f"FAMILY {fam} rows={rows} valid={valid} facet={facet if members[0].is_facet is not None else '-'} {verdict}")
    for fam, why in sorted(rep.skipped.items()):
        lines.append(f"FAMILY {fam} SKIPPED NotApplicable: {why}")
    return "\n".join(lines) + "\n"


def format_case_table(cases: dict, variables, rel, rhs) -> str:
    lines = ["case " + " ".join(variables) + "  min  max"]
    for pattern, (lo, hi) in cases.items():
        lines.append(" ".join(str(v) for v in pattern) + f"  {format_rational(lo)}  {format_rational(hi)}")
    lines.append(f"rhs {rel.value} {format_rational(rhs)}")
    return "\n".join(lines) + "\n"
