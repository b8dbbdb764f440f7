import random
from fractions import Fraction as F

import pytest

from facetlab.errors import DimensionMismatch, NotApplicable, NTooSmall, TooLarge, UnsupportedFormat
from facetlab.optimizer import MipModel, Mode, Sense, Status, Variable, enumerate_binary_solutions, solve_lp
from facetlab.polytope import Relation, eca, polytope_dimension
from facetlab.ratlinalg import rank_of_rows
from facetlab.tsplab import (AtspInstance, TspSpace, build_hbeta, build_sd, build_tsp_h, build_tsp_h_star,
                             case_table, enumerate_tours, family_rows, hbeta_point, indegree_equalities,
                             load_bundled, lp_bound, parse_tsplib_atsp, sd_solution, set3_constraint,
                             set3_members, tour_polytope_dimension, tour_to_point, tour_vertex_set,
                             tsp_h_equalities, validate_set3)
from facetlab.tsplab import set3 as set3mod
from facetlab.tsplab.instance import format_tsplib_atsp
from facetlab.tsplab.models import outdegree_equalities, tsp_h_solution
from facetlab.tsplab.tours import Tour

B9 = F(9, 10)


def random_instance(n, seed):
    rng = random.Random(seed)
    costs = [[0 if i == j else rng.randint(1, 30) for j in range(n)] for i in range(n)]
    return AtspInstance(f"rand{n}_{seed}", costs)


# -- instances --------------------------------------------------------------

def test_br17_loads():
    inst = load_bundled("br17")
    assert inst.n == 17 and inst.c(1, 2) == 3 and inst.c(2, 1) == 3


def test_tsplib_round_trip():
    inst = random_instance(5, 1)
    again = parse_tsplib_atsp(format_tsplib_atsp(inst))
    assert again.costs == inst.costs and again.name == inst.name


HEADER = "NAME: t\nTYPE: ATSP\nDIMENSION: 3\nEDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: FULL_MATRIX\n"


def test_tsplib_rejects_other_formats():
    with pytest.raises(UnsupportedFormat):
        parse_tsplib_atsp(HEADER.replace("ATSP", "TSP") + "EDGE_WEIGHT_SECTION\n" + "0 1 1\n" * 3)
    with pytest.raises(UnsupportedFormat):
        parse_tsplib_atsp(HEADER.replace("FULL_MATRIX", "UPPER_ROW") + "EDGE_WEIGHT_SECTION\n1 1 1\n")


def test_tsplib_counts_entries():
    with pytest.raises(DimensionMismatch):
        parse_tsplib_atsp(HEADER + "EDGE_WEIGHT_SECTION\n0 1 1\n1 0 1\nEOF\n")
    ok = parse_tsplib_atsp(HEADER + "EDGE_WEIGHT_SECTION\n0 1 2\n3 0 4\n5 6 0\nEOF\n")
    assert ok.c(3, 2) == 6 and ok.tour_cost([1, 2, 3]) == 1 + 4 + 5


# -- tours and coordinates -----------------------------------------------------

def test_tour_enumeration():
    tours = enumerate_tours(5)
    assert len(tours) == 24
    assert [str(t) for t in tours[:2]] == ["1->2->3->4->5->1", "1->2->3->5->4->1"]
    with pytest.raises(TooLarge):
        enumerate_tours(10)
    with pytest.raises(ValueError):
        Tour((2, 1, 3))


def test_tour_point_discounts_along_the_tour():
    p = tour_to_point(Tour((1, 3, 2, 4)), B9)
    assert p.xv(1, 3) == 1 and p.xv(3, 2) == B9 and p.xv(2, 4) == B9 ** 2 and p.xv(4, 1) == B9 ** 3
    assert p.zv(3, 2) == 1 and p.zv(2, 3) == 0


def test_space_layout():
    sp = TspSpace(6)
    assert sp.dim == 50 and TspSpace(7).dim == 72
    assert sp.names[0] == "z1_2" and sp.names[30] == "x2_3"
    # x_1j -> z_1j and x_j1 -> beta^(n-1) z_j1
    v = sp.coefficients({("x", 1, 4): 2, ("x", 4, 1): 1}, B9)
    assert v[sp.z_index(1, 4)] == 2 and v[sp.z_index(4, 1)] == B9 ** 5
    with pytest.raises(ValueError):
        sp.coefficients({("x", 4, 1): 1})


def test_symmetry_template():
    sp = TspSpace(5)
    keep = set(sp.template_coordinates())
    assert keep | sp.symmetry_mask() == set(range(sp.dim))
    assert not keep & sp.symmetry_mask()
    assert sp.z_index(4, 5) not in keep and sp.x_index(4, 5) in sp.symmetry_mask()
    assert sp.z_index(4, 1) in keep and sp.x_index(2, 5) in keep


# -- H_beta and TSP_H ------------------------------------------------------------

FIG2_ARCS = [(1, 2), (1, 4), (1, 5), (2, 1), (2, 3), (3, 2), (3, 4), (4, 1), (4, 3), (4, 5), (5, 1), (5, 4)]


def test_hbeta_small_graph_display():
    b = B9
    H = build_hbeta(5, b, FIG2_ARCS)
    cols = [(i, j) for i in range(1, 6) for j in range(1, 6) if i != j]

    def row(d):
        return tuple(F(d.get(a, 0)) for a in cols)

    want = [
        (row({(1, 2): 1, (1, 4): 1, (1, 5): 1, (2, 1): -b, (4, 1): -b, (5, 1): -b}), 1 - b ** 5),
        (row({(2, 1): 1, (2, 3): 1, (1, 2): -b, (3, 2): -b}), 0),
        (row({(3, 2): 1, (3, 4): 1, (2, 3): -b, (4, 3): -b}), 0),
        (row({(4, 1): 1, (4, 3): 1, (4, 5): 1, (1, 4): -b, (3, 4): -b, (5, 4): -b}), 0),
        (row({(5, 1): 1, (5, 4): 1, (1, 5): -b, (4, 5): -b}), 0),
        (row({(1, 2): 1, (1, 4): 1, (1, 5): 1}), 1),
    ]
    assert [(c.coeffs, c.rhs) for c in H.equalities[:6]] == want
    assert len(H.inequalities) == len(FIG2_ARCS)
    # the reference extreme point
    x = {(1, 2): 1, (2, 3): b, (3, 4): b ** 2, (4, 5): b ** 3, (5, 1): b ** 4}
    pt = tuple(F(x.get(a, 0)) for a in cols)
    assert not H.violated_by(pt)
    active = [c.coeffs for c in H.all() if c.is_tight(pt)]
    assert rank_of_rows(active, len(cols)) == len(cols)


@pytest.mark.parametrize("n", [4, 5, 6])
@pytest.mark.parametrize("beta", [B9, F(999, 1000), F(1, 3)])
def test_tours_satisfy_hbeta_and_tsp_h(n, beta):
    inst = random_instance(n, n)
    H = build_hbeta(n, beta)
    m = build_tsp_h(inst, beta, indegree=True)
    for t in enumerate_tours(n):
        p = tour_to_point(t, beta)
        assert not H.violated_by(hbeta_point(p))
        v = tsp_h_solution(inst, p)
        assert m.is_feasible(v)
        assert m.objective_value(v) == inst.tour_cost(t.order)


def test_sd_accepts_tours_with_their_cost():
    inst = random_instance(5, 3)
    m = build_sd(inst)
    for t in enumerate_tours(5):
        v = sd_solution(inst, t.order)
        assert m.is_feasible(v)
        assert m.objective_value(v) == inst.tour_cost(t.order)


@pytest.mark.parametrize("n", [4, 5])
def test_integral_points_of_tsp_h_are_tours(n):
    inst = random_instance(n, 7)
    sp = TspSpace(n)
    model = build_tsp_h(inst, B9)
    # z vectors allowed by the out-degree rows, then check which admit an x
    zvars = tuple(Variable.binary(f"z{i}_{j}") for i, j in sp.z_arcs)
    nz = len(zvars)
    zrows = [type(c)(c.coeffs[:nz], c.relation, c.rhs) for c in outdegree_equalities(n, sp)]
    cands = enumerate_binary_solutions(MipModel(zvars, Sense.MIN, (0,) * nz, tuple(zrows)))
    feasible = set()
    for z in cands.points:
        fixed = model.relaxed().with_bounds({k: (z[k], z[k]) for k in range(nz)})
        if solve_lp(fixed, Mode.EXACT).status is Status.OPTIMAL:
            feasible.add(tuple(z))
    tours = {tuple(sp.vector(tour_to_point(t, B9))[:nz]) for t in enumerate_tours(n)}
    assert feasible == tours


def test_eca_on_tours_finds_indegree_rows():
    n, b = 6, B9
    S = tour_vertex_set(n, b)
    A0 = tsp_h_equalities(n, b)
    res = eca(S, A0)
    assert res.dimension == 34
    assert res.d == n - 2
    indeg = indegree_equalities(n)
    base = [c.coeffs + (c.rhs,) for c in A0]
    r_eca = rank_of_rows(base + [c.coeffs + (c.rhs,) for c in res.equalities], S.n + 1)
    r_ind = rank_of_rows(base + [c.coeffs + (c.rhs,) for c in indeg], S.n + 1)
    r_all = rank_of_rows(base + [c.coeffs + (c.rhs,) for c in list(res.equalities) + indeg], S.n + 1)
    assert r_eca == r_ind == r_all


def test_bound_ordering_on_small_instances():
    for seed in range(3):
        inst = random_instance(6, seed)
        for b in (B9, F(99, 100)):
            assert lp_bound(build_tsp_h_star(inst, b)) >= lp_bound(build_tsp_h(inst, b)) - 1e-9


def test_tsp_h_star_needs_six_nodes():
    with pytest.raises(NTooSmall):
        build_tsp_h_star(random_instance(5, 0), B9)


# -- Set 3 ----------------------------------------------------------------------

def test_family_applicability():
    with pytest.raises(NotApplicable):
        family_rows(11, 7, B9)
    with pytest.raises(NTooSmall):
        family_rows(1, 5, B9)
    assert len(family_rows(11, 6, B9)) == 1
    with pytest.raises(ValueError):
        family_rows(12, 6, B9)


def test_member_counts():
    ms = set3_members(6)
    assert sum(1 for f, *_ in ms if f == 2) == 5
    assert sum(1 for f, *_ in ms if f == 4) == 20
    assert all(f != 11 for f, *_ in set3_members(7))


def test_family1_expansion_at_node_one():
    # sum over a = 1..n, a != i, j includes x_j1 -> beta^(n-1) z_j1
    sp = TspSpace(6)
    lo, hi = set3_constraint(1, 2, 3, 6, B9, space=sp)
    assert lo.relation is Relation.GE and hi.relation is Relation.LE
    assert lo.coeffs[sp.z_index(3, 1)] == B9 ** 5
    assert lo.coeffs[sp.x_index(3, 4)] == 1 and lo.coeffs[sp.x_index(2, 3)] == -B9


def test_tour_polytope_dimension():
    assert tour_polytope_dimension(6, B9) == 34
    assert tour_polytope_dimension(5, B9) == polytope_dimension(tour_vertex_set(5, B9)) == 19


def test_validate_small_families():
    rep = validate_set3(6, B9, families=(1, 2, 3))
    assert rep.all_valid and rep.all_facets
    assert rep.dimension == 34 and rep.tours == 120


def test_parallel_validation_matches_serial():
    a = validate_set3(6, F(999, 1000), families=(4, 9), jobs=2)
    b = validate_set3(6, F(999, 1000), families=(4, 9))
    assert a.results == b.results


def test_family10_sum_from_two_is_not_facet(monkeypatch):
    # with the inner z_ji sum starting at a = 2, beta^2 is counted twice
    def variant(n, b):
        d = 1 + b ** (n - 3) + 2 * set3mod.geo(b, 1, n - 4)
        zji = b ** (n - 3) * (1 + b + set3mod.geo(b, 2, n - 2)) / d
        xji = (1 - b ** (n - 3) + 2 * b + set3mod.geo(b, 2, n - 5)) / d
        return set3mod._tail_family(n, b, zji, xji)

    monkeypatch.setitem(set3mod.COEFFICIENTS, 10, variant)
    rep = validate_set3(6, B9, families=(10,))
    assert rep.all_valid and not rep.all_facets


def test_violated_family_is_reported(monkeypatch):
    def broken(n, b):
        rel, rhs, coeffs = set3mod._f3(n, b)[0]
        return [(rel, rhs - 1, coeffs)]

    monkeypatch.setitem(set3mod.COEFFICIENTS, 3, broken)
    rep = validate_set3(6, B9, families=(3,), facets=False)
    assert not rep.all_valid
    assert all(r.violations > 0 for r in rep.results)


def test_family1_case_table_exact():
    for n in (6, 7):
        cases, rel, rhs = case_table(1, n, B9)
        assert cases[(1, 0)] == (0, 0)
        assert cases[(0, 1)] == (0, 0)
        assert cases[(0, 0)] == (B9 ** (n - 1), B9)
