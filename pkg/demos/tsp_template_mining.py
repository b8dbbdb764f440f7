"""Tour polytope of K_5 in TSP_H coordinates: missing equalities, then a few facets.

Mining is restricted to arcs around nodes 1, 2, 3 (the symmetry template);
the float solver keeps each MIP to a couple of seconds.

    python3 demos/tsp_template_mining.py [iterations]
"""

import sys
from fractions import Fraction

from facetlab.facetminer import FacetSearchConfig, mine
from facetlab.optimizer import Mode
from facetlab.polytope import eca
from facetlab.tsplab import TspSpace, tour_vertex_set, tsp_h_equalities

n, beta = 5, Fraction(9, 10)
iters = int(sys.argv[1]) if len(sys.argv) > 1 else 4
space = TspSpace(n)
S = tour_vertex_set(n, beta)
A0 = tsp_h_equalities(n, beta, space)
print(f"{S.N} tours, {S.n} coordinates, {len(A0)} equalities in the base model")

res = eca(S, A0)
print(f"dim = {res.dimension}; {res.d} equalities were missing:")
for c in res.equalities:
    print("  ", c.pretty(space.names))

cfg = FacetSearchConfig.tsp_preset(mask=space.symmetry_mask(), mode=Mode.FLOAT, max_iterations=iters)
rep = mine(S, A0 + list(res.equalities), None, cfg)
for k, it in enumerate(rep.iterations, 1):
    print(f"{k}: {it.classification.value} |support|={len(it.support)}  {it.display.pretty(space.names)}")
print("stopped:", rep.termination.value)
