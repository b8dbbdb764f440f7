"""LP bounds of TSP_H, the strengthened TSP_H* and SD on br17 (about 1.5 minutes).

    python3 demos/br17_bounds.py
"""

from fractions import Fraction

from facetlab.tsplab import load_bundled
from facetlab.tsplab.report import compute_bound, format_bound_table

inst = load_bundled("br17")
rows = []
for model, beta in [("tsp_h", Fraction(999, 1000)), ("tsp_h", Fraction(9999, 10000)),
                    ("tsp_h_star", Fraction(999, 1000)), ("tsp_h_star", Fraction(9999, 10000)), ("sd", None)]:
    row = compute_bound(inst, model, beta)
    rows.append(row)
    print(row.line(), f"({row.seconds:.1f} s)", flush=True)
print()
print(format_bound_table(rows))
