from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from facetlab.errors import InconsistentInput, ParseError
from facetlab.polytope import (LinearConstraint, Relation, VertexSet, affine_hull, eca,
                               equivalent_on_hull, format_lin, format_vtx, parse_constraint,
                               parse_lin, parse_vtx, polytope_dimension)
from facetlab.ratlinalg import rank_of_rows


def test_stasheff_dimension_and_hull(stasheff):
    assert stasheff.n == 4 and stasheff.N == 14
    assert polytope_dimension(stasheff) == 3
    A, b = affine_hull(stasheff)
    assert A.tolist() == [[1, 1, 1, 1]] and b == (10,)


def test_stasheff_eca_gives_sum_ten(stasheff):
    res = eca(stasheff)
    assert res.d == 1 and res.dimension == 3
    assert [c.to_lin() for c in res.equalities] == ["EQ 10 1 1 1 1"]


def test_eca_with_complete_known_system_returns_nothing(stasheff, hull_eq):
    res = eca(stasheff, hull_eq)
    assert res.d == 0 and res.equalities == ()


def test_eca_rejects_violated_known_equality(stasheff):
    bad = LinearConstraint.make([1, 0, 0, 0], "EQ", 1)
    with pytest.raises(InconsistentInput):
        eca(stasheff, [bad])


def test_eca_unpacks_as_pair(stasheff):
    Q, d = eca(stasheff)
    assert d == 1 and len(Q) == 1


def test_single_point_has_dimension_zero():
    S = VertexSet([(1, 2, 3)])
    assert polytope_dimension(S) == 0
    res = eca(S)
    assert res.d == 3
    assert all(c.is_satisfied((1, 2, 3)) for c in res.equalities)


def test_full_dimensional_set_has_no_equalities():
    S = VertexSet([(0, 0), (1, 0), (0, 1)])
    A, b = affine_hull(S)
    assert A.rows == 0
    assert eca(S).d == 0


def test_duplicate_points_rejected():
    with pytest.raises(ValueError):
        VertexSet([(1, 2), (1, 2)])


def test_constraint_text_round_trip():
    c = parse_constraint("LE 7/2 1 -1/3 0")
    assert c.relation is Relation.LE and c.rhs == F(7, 2)
    assert parse_constraint(c.to_lin()) == c
    assert c.slack((1, 0, 0)) == F(5, 2)
    assert c.negated().relation is Relation.GE


def test_vtx_round_trip(stasheff):
    assert parse_vtx(format_vtx(stasheff)).points == stasheff.points


def test_lin_round_trip(facets7):
    assert parse_lin(format_lin(facets7), 4) == facets7


@pytest.mark.parametrize("text, line", [
    ("", 1),
    ("2 x\n1 2\n", 1),
    ("2 2\n1 2\n3\n", 3),
    ("2 2\n1 2\n", 3),
    ("# c\n2 1\n1 zz\n", 3),
])
def test_vtx_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as exc:
        parse_vtx(text)
    assert exc.value.line == line


def test_lin_parse_errors():
    with pytest.raises(ParseError) as exc:
        parse_lin("EQ 1 1 1\nXX 2 1 1\n", 2)
    assert exc.value.line == 2
    with pytest.raises(ParseError):
        parse_lin("LE 1 1 1 1\n", 2)


def test_equivalent_on_hull_uses_equalities(hull_eq):
    a = parse_constraint("GE 6 1 1 1 0")
    b = parse_constraint("LE 4 0 0 0 1")
    assert equivalent_on_hull(a, b, hull_eq)
    assert not equivalent_on_hull(a, b, [])
    flipped = parse_constraint("GE 4 0 0 0 1")
    assert not equivalent_on_hull(a, flipped, hull_eq)


def _planted(seed_pts, A, c):
    # x = A y + c for integer y
    return [tuple(sum(A[i][k] * y[k] for k in range(len(y))) + c[i] for i in range(len(A))) for y in seed_pts]


@st.composite
def embedded_sets(draw):
    n = draw(st.integers(2, 5))
    d = draw(st.integers(0, n))
    A = [[draw(st.integers(-3, 3)) for _ in range(d)] for _ in range(n)]
    c = [draw(st.integers(-5, 5)) for _ in range(n)]
    ys = draw(st.lists(st.tuples(*[st.integers(-3, 3)] * d), min_size=1, max_size=8, unique=True)) if d else [()]
    pts = list(dict.fromkeys(_planted(ys, A, c)))
    return VertexSet(pts, n)


@settings(max_examples=80, deadline=None)
@given(embedded_sets())
def test_eca_sound_complete_independent(S):
    res = eca(S)
    for c in res.equalities:
        assert all(c.is_satisfied(p) for p in S.points)
    assert rank_of_rows([c.coeffs for c in res.equalities], S.n) == S.n - res.dimension
    assert res.d == S.n - res.dimension
    assert eca(S) == res
