from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from facetlab.ratlinalg import (IncrementalRank, RationalMatrix, certified_rank, format_rational,
                                null_space_basis, primitive, rank, rank_mod_p, rank_of_rows, rref,
                                to_rational)


def test_to_rational_reads_decimals_exactly():
    assert to_rational("0.999") == F(999, 1000)
    assert to_rational(0.999) == F(999, 1000)
    assert to_rational("3/7") == F(3, 7)
    assert to_rational(5) == 5
    with pytest.raises(ValueError):
        to_rational(float("nan"))
    with pytest.raises(TypeError):
        to_rational(True)


def test_format_rational():
    assert format_rational(F(4)) == "4"
    assert format_rational(F(-3, 6)) == "-1/2"


def test_rref_small():
    M = RationalMatrix([[2, 4, 6], [1, 1, 1], [3, 5, 7]])
    R, piv, r = rref(M)
    assert r == 2 and piv == [0, 1]
    assert R.tolist() == [[1, 0, -1], [0, 1, 2], [0, 0, 0]]


def test_null_space_of_stasheff_differences():
    # differences of the first four Stasheff points span a 3-dim space in R^4
    pts = [(1, 6, 2, 1), (1, 6, 1, 2), (1, 4, 1, 4), (4, 3, 1, 2)]
    M = RationalMatrix([[a - b for a, b in zip(p, pts[0])] for p in pts[1:]])
    N = null_space_basis(M)
    assert N.shape == (4, 1)
    assert N.col(0) == (1, 1, 1, 1)


def test_null_space_full_rank_is_empty():
    N = null_space_basis(RationalMatrix.identity(3))
    assert N.shape == (3, 0)


def test_empty_matrix_rejected():
    with pytest.raises(ValueError):
        rank(RationalMatrix(cols=0))


def test_primitive_scales_to_coprime_integers():
    assert primitive([F(1, 2), F(-3, 4), 0]) == (2, -3, 0)


def test_incremental_rank_reports_independence():
    acc = IncrementalRank(3)
    assert acc.add([1, 2, 3])
    assert not acc.add([2, 4, 6])
    assert acc.add([0, 1, 0])
    assert acc.reduces_to_zero([1, 3, 3])
    assert acc.rank == 2


def test_rank_mod_p_bounds_rational_rank():
    rows = [[1, 2, 3], [2, 4, 6], [1, 0, 1]]
    assert rank_mod_p(rows, 3) == 2
    # a matrix singular mod 7 but not over Q: modular rank is only a lower bound
    assert rank_mod_p([[7, 0], [0, 1]], 2, p=7) == 1
    assert rank_of_rows([[7, 0], [0, 1]], 2) == 2


def test_certified_rank_falls_back_when_modular_rank_is_short():
    p = 2_147_483_647
    rows = [[p, 0], [0, 1]]
    assert rank_mod_p(rows, 2) == 1
    assert certified_rank(rows, 2, upper=2) == 2
    assert certified_rank([], 4) == 0


small_ints = st.integers(min_value=-4, max_value=4)


@st.composite
def matrices(draw):
    r = draw(st.integers(1, 5))
    c = draw(st.integers(1, 6))
    return RationalMatrix([[draw(small_ints) for _ in range(c)] for _ in range(r)])


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_null_space_annihilates_and_rank_nullity(M):
    N = null_space_basis(M)
    assert N.cols + rank(M) == M.cols
    if N.cols:
        assert (M @ N).is_zero()


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_rref_idempotent_and_deterministic(M):
    R, piv, r = rref(M)
    R2, piv2, r2 = rref(R)
    assert R2 == R and piv2 == piv and r2 == r
    assert rref(M)[0] == R
    assert null_space_basis(M) == null_space_basis(M)


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_modular_rank_agrees_on_small_integers(M):
    rows = [[int(v) for v in r] for r in M.row_tuples()]
    assert rank_mod_p(rows, M.cols) == rank(M)
    assert certified_rank(rows, M.cols, upper=min(M.rows, M.cols)) == rank(M)
