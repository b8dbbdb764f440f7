"""Command-line front end.

Exit codes: 0 ok, 1 other failure, 2 parse error, 3 inconsistent input,
4 node budget exhausted.
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

from . import __version__
from .errors import (DimensionMismatch, FacetLabError, InconsistentInput, NodeLimitExceeded, ParseError,
                     UnsupportedFormat)
from .facetminer import (FacetSearchConfig, Termination, brute_force_facets, format_header, format_iteration, mine,
                         redundancy_check)
from .optimizer import Mode
from .polytope import (Relation, eca, format_lin, format_vtx, parse_constraint, parse_lin, parse_vtx,
                       polytope_dimension)
from .ratlinalg import to_rational

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_INCONSISTENT, EXIT_BUDGET = 0, 1, 2, 3, 4


def _read_text(spec: str) -> str:
    """File contents; ``pkg:NAME`` reads a file bundled with the package, ``-`` reads stdin."""
    if spec == "-":
        return sys.stdin.read()
    if spec.startswith("pkg:"):
        return resources.files("facetlab").joinpath("data", spec[4:]).read_text()
    return Path(spec).read_text()


def _load_vertices(spec: str):
    try:
        return parse_vtx(_read_text(spec))
    except ParseError as exc:
        raise ParseError(f"{spec}: {exc}") from None


def _load_known(spec: str | None, n: int):
    if not spec:
        return []
    try:
        return parse_lin(_read_text(spec), n)
    except ParseError as exc:
        raise ParseError(f"{spec}: {exc}") from None


def _rational(text: str):
    try:
        return to_rational(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _index_list(text: str) -> list[int]:
    try:
        out = [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated indices, got {text!r}") from None
    if any(k < 1 for k in out):
        raise argparse.ArgumentTypeError("indices are 1-based")
    return out


# -- eca ----------------------------------------------------------------------------

def cmd_eca(args) -> int:
    S = _load_vertices(args.vertices)
    known = _load_known(args.known, S.n)
    eqs = [c for c in known if c.relation is Relation.EQ]
    res = eca(S, eqs, anchor=args.anchor - 1)
    print(f"# d={res.d} dim={res.dimension}")
    if res.d == 0:
        print("# d=0: no new equality constraints")
    sys.stdout.write(format_lin(res.equalities))
    return EXIT_OK


# -- mine ---------------------------------------------------------------------------

def _mining_config(args, n: int) -> FacetSearchConfig:
    mask = set()
    if args.mask:
        mask |= {k - 1 for k in args.mask}
    if args.tsp_template:
        from .tsplab.tours import TspSpace

        sp = TspSpace(args.tsp_template)
        if sp.dim != n:
            raise InconsistentInput(f"--tsp-template {args.tsp_template} has {sp.dim} coordinates, vertices have {n}")
        mask |= sp.symmetry_mask()
    if any(k >= n for k in mask):
        raise InconsistentInput(f"mask index beyond dimension {n}")
    kw = dict(M=args.big_m, pi_bound=args.pi_bound, face_threshold=args.face_threshold,
              mask=frozenset(mask) or None, node_budget=args.node_budget or None,
              mode=Mode(args.mode.upper()), max_iterations=args.max_iterations)
    if args.epsilon is not None:
        kw["epsilon"] = args.epsilon
    return FacetSearchConfig.tsp_preset(**kw) if args.tsp_preset else FacetSearchConfig(**kw)


def cmd_mine(args) -> int:
    S = _load_vertices(args.vertices)
    known = _load_known(args.known, S.n)
    eqs = [c for c in known if c.relation is Relation.EQ]
    B0 = [c for c in known if c.relation is not Relation.EQ]
    if args.auto_eca:
        eqs = eqs + list(eca(S, eqs).equalities)
    cfg = _mining_config(args, S.n)

    print(format_header(_preview_report(S, eqs, cfg), S), flush=True)
    count = 0

    def show(it):
        nonlocal count
        count += 1
        print(format_iteration(count, it), flush=True)

    report = mine(S, eqs, B0, cfg, on_iteration=show)
    print(f"TERM {report.termination.value}")
    status = EXIT_BUDGET if report.termination is Termination.NODE_BUDGET else EXIT_OK
    if args.oracle:
        want = brute_force_facets(S, eqs)
        have = {frozenset(t for t in range(1, S.N + 1) if c.is_tight(S.point(t))) for c in B0}
        have |= {it.support for it in report.new_facets}
        missing = sorted(sorted(f) for f in want - have)
        extra = sorted(sorted(f) for f in have - want)
        ok = not missing and not extra
        print(f"ORACLE {'MATCH' if ok else 'MISMATCH'} facets={len(want)} missing={missing} extra={extra}")
        if not ok and status == EXIT_OK:
            status = EXIT_FAIL
    return status


def _preview_report(S, eqs, cfg):
    from .facetminer import MiningReport, equality_rank

    return MiningReport(n=S.n, N=S.N, dimension=polytope_dimension(S), rank_eq=equality_rank(eqs, S.n), config=cfg)


# -- check --------------------------------------------------------------------------

def cmd_check(args) -> int:
    S = _load_vertices(args.vertices)
    known = _load_known(args.known, S.n)
    ineq = parse_constraint(args.inequality, S.n)
    if ineq.relation is Relation.EQ:
        raise ParseError("check expects an inequality (LE or GE)")
    eqs = [c for c in known if c.relation is Relation.EQ]
    B0 = [c for c in known if c.relation is not Relation.EQ]
    bad = [t for t in range(1, S.N + 1) if not ineq.is_satisfied(S.point(t))]
    if bad:
        print(f"INVALID violated_by={{{','.join(map(str, bad))}}}")
        return EXIT_OK
    tight = S.tight_labels(ineq)
    dim = polytope_dimension(S)
    fdim = polytope_dimension(S.subset(tight)) if tight else -1
    facet = fdim == dim - 1
    hull = eqs + list(eca(S, eqs).equalities)
    red = redundancy_check(ineq, hull, B0)
    print(f"VALID face_dim={fdim} {'FACET' if facet else 'NONFACET'} {red.value} "
          f"support={{{','.join(map(str, tight))}}}")
    return EXIT_OK


# -- tsp ----------------------------------------------------------------------------

def cmd_tsp_bounds(args) -> int:
    from .tsplab.instance import load_instance
    from .tsplab.report import MODELS, compute_bound, format_bound_table

    inst = load_instance(args.instance)
    models = MODELS if args.model == "all" else (args.model,)
    betas = args.beta or [to_rational("0.999"), to_rational("0.9999")]
    rows = []
    for m in models:
        for b in ([None] if m == "sd" else betas):
            row = compute_bound(inst, m, b)
            rows.append(row)
            print(row.line(), flush=True)
    print()
    sys.stdout.write(format_bound_table(rows))
    return EXIT_OK


def cmd_tsp_validate(args) -> int:
    from .tsplab.report import format_set3_report
    from .tsplab.set3 import validate_set3

    fams = args.families or list(range(1, 12))
    rep = validate_set3(args.n, args.beta, fams, facets=not args.no_facets, jobs=args.jobs)
    sys.stdout.write(format_set3_report(rep, detail=args.detail))
    return EXIT_OK if rep.all_valid else EXIT_FAIL


def cmd_tsp_tours(args) -> int:
    from .tsplab.tours import tour_vertex_set

    text = format_vtx(tour_vertex_set(args.n, args.beta))
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_tsp_equalities(args) -> int:
    from .tsplab.models import tsp_h_equalities

    sys.stdout.write(format_lin(tsp_h_equalities(args.n, args.beta)))
    return EXIT_OK


def cmd_tsp_cases(args) -> int:
    from .tsplab.report import format_case_table
    from .tsplab.set3 import CASE_VARIABLES, case_table

    variables = CASE_VARIABLES[args.family]
    cases, rel, rhs = case_table(args.family, args.n, args.beta)
    sys.stdout.write(format_case_table(cases, variables, rel, rhs))
    return EXIT_OK


# -- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="facetlab", description="Equality and facet mining for 0/1 and TSP polytopes.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for parallel stages (default 1)")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eca", help="discover missing equality constraints")
    e.add_argument("vertices", help=".vtx file ('pkg:stasheff.vtx' for bundled data, '-' for stdin)")
    e.add_argument("--known", help=".lin file with known constraints (EQ rows are used)")
    e.add_argument("--anchor", type=int, default=1, help="1-based anchor point (default 1)")
    e.set_defaults(func=cmd_eca)

    m = sub.add_parser("mine", help="mine facet-defining inequalities")
    m.add_argument("vertices")
    m.add_argument("--known", help=".lin file: equality system and known inequalities")
    m.add_argument("--auto-eca", action="store_true", help="complete the equality system before mining")
    m.add_argument("--epsilon", type=_rational, default=None, help="strictness gap (default 1/100)")
    m.add_argument("--big-m", type=_rational, default=to_rational(100), help="big-M constant (default 100)")
    m.add_argument("--pi-bound", type=_rational, default=to_rational(1), help="|pi_k| bound (default 1)")
    m.add_argument("--face-threshold", type=int, default=None,
                   help="lowest face dimension accepted (default dim - 1: facets only)")
    m.add_argument("--mask", type=_index_list, default=None, help="1-based coordinates whose coefficient is zero")
    m.add_argument("--tsp-template", type=int, metavar="N", default=None,
                   help="zero every coefficient outside the nodes-1,2,3 template of the n-city tour space")
    m.add_argument("--tsp-preset", action="store_true", help="TSP defaults (epsilon = 1/10)")
    m.add_argument("--node-budget", type=int, default=200_000)
    m.add_argument("--max-iterations", type=int, default=None)
    m.add_argument("--mode", choices=("exact", "float"), default="exact")
    m.add_argument("--oracle", action="store_true", help="compare against brute-force facet enumeration")
    m.set_defaults(func=cmd_mine)

    c = sub.add_parser("check", help="classify one inequality against a vertex set")
    c.add_argument("vertices")
    c.add_argument("known", help=".lin file of known constraints")
    c.add_argument("inequality", help="inequality in .lin syntax, e.g. 'LE 4 1 0 0 0'")
    c.set_defaults(func=cmd_check)

    t = sub.add_parser("tsp", help="travelling-salesman case study")
    tsub = t.add_subparsers(dest="tsp_command", required=True)

    b = tsub.add_parser("bounds", help="LP-relaxation bounds on an ATSP instance")
    b.add_argument("--instance", default="br17", help="TSPLIB ATSP file or bundled name (default br17)")
    b.add_argument("--model", choices=("tsp_h", "tsp_h_star", "sd", "all"), default="all")
    b.add_argument("--beta", type=_rational, action="append", help="discount factor; repeatable (default 0.999 and 0.9999)")
    b.set_defaults(func=cmd_tsp_bounds)

    v = tsub.add_parser("validate-set3", help="check the Set-3 families against all tours")
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--beta", type=_rational, required=True)
    v.add_argument("--families", type=_index_list, default=None, help="comma-separated family ids (default all)")
    v.add_argument("--no-facets", action="store_true", help="validity only (skip face dimensions)")
    v.add_argument("--detail", action="store_true", help="one line per family member")
    v.set_defaults(func=cmd_tsp_validate)

    tt = tsub.add_parser("tours", help="write all tour points as a .vtx file")
    tt.add_argument("--n", type=int, required=True)
    tt.add_argument("--beta", type=_rational, required=True)
    tt.add_argument("--output", "-o", default=None)
    tt.set_defaults(func=cmd_tsp_tours)

    q = tsub.add_parser("equalities", help="write the TSP_H equality rows as a .lin file")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--beta", type=_rational, required=True)
    q.set_defaults(func=cmd_tsp_equalities)

    k = tsub.add_parser("cases", help="per-case min/max of a family's left-hand side")
    k.add_argument("--family", type=int, choices=(1, 6, 7, 10), required=True)
    k.add_argument("--n", type=int, required=True)
    k.add_argument("--beta", type=_rational, required=True)
    k.set_defaults(func=cmd_tsp_cases)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, UnsupportedFormat, DimensionMismatch) as exc:
        print(f"facetlab: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InconsistentInput as exc:
        print(f"facetlab: inconsistent input: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except NodeLimitExceeded as exc:
        print(f"facetlab: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (FacetLabError, FileNotFoundError, ValueError) as exc:
        print(f"facetlab: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
