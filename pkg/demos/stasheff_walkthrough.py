"""Stasheff polytope walkthrough: equalities, facet mining, completeness check.

    python3 demos/stasheff_walkthrough.py
"""

import random
from importlib import resources

from facetlab.facetminer import FacetSearchConfig, format_iteration, mine
from facetlab.optimizer import MipModel, Sense, Variable, solve_lp
from facetlab.polytope import eca, parse_lin, parse_vtx


def data(name):
    return resources.files("facetlab").joinpath("data", name).read_text()


S = parse_vtx(data("stasheff.vtx"))
B0 = parse_lin(data("stasheff_facets.lin"), S.n)
print(f"{S.N} points in R^{S.n}")

# the points sit on one hyperplane; the equality miner finds it
res = eca(S)
print(f"dim conv(S) = {res.dimension}, missing equalities: {res.d}")
for c in res.equalities:
    print("  ", c.pretty())

# seven facets are known; mine the rest
print("\nmining with the seven known facets given:")
rep = mine(S, res.equalities, B0, FacetSearchConfig())
for k, it in enumerate(rep.iterations, 1):
    print("  " + format_iteration(k, it))
    print("     i.e.", it.display.pretty())
print(f"  stopped: {rep.termination.value}, caps used {rep.caps}")

# the nine facets plus the hull equality describe conv(S):
# LP maxima agree with vertex maxima in every direction we try
H = list(res.equalities) + B0 + [it.display for it in rep.new_facets]
xs = tuple(Variable.free(f"x{k + 1}") for k in range(S.n))
rng = random.Random(0)
hits = 0
for _ in range(100):
    c = tuple(rng.randint(-9, 9) for _ in range(S.n))
    hits += solve_lp(MipModel(xs, Sense.MAX, c, tuple(H))).objective == S.max_of(c)
print(f"\nsupport function check: {hits}/100 directions agree")
