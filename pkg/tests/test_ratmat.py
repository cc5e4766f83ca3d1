from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polysum.ratmat import (RationalMatrix, format_rational, kernel_basis, parse_rational, rank,
                            row_basis, rref, solve)


def test_parse_and_format():
    assert parse_rational("3/6") == F(1, 2)
    assert parse_rational(" -4 / 2 ") == F(-2)
    assert parse_rational("+7") == F(7)
    assert format_rational(F(3, 1)) == "3"
    assert format_rational(F(-2, 4)) == "-1/2"


@pytest.mark.parametrize("bad", ["1/0", "", "1.5", "a/b", "1/-2"])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        parse_rational(bad)


def test_rref_examples():
    R, r, piv = rref(RationalMatrix.identity(2))
    assert (R, r, piv) == (RationalMatrix.identity(2), 2, [0, 1])
    R, r, piv = rref(RationalMatrix.zeros(2, 3))
    assert (R, r, piv) == (RationalMatrix.zeros(2, 3), 0, [])
    R, r, piv = rref(RationalMatrix([[2, 4], [1, 2]]))
    assert R == RationalMatrix([[1, 2], [0, 0]]) and r == 1 and piv == [0]


def test_rref_of_empty_matrix():
    assert rref(RationalMatrix([], cols=3))[1] == 0


def test_kernel_examples():
    assert kernel_basis(RationalMatrix.identity(2)) == []
    (v,) = kernel_basis(RationalMatrix([[1, 1]]))
    assert v[0] == -v[1] != 0
    M = RationalMatrix([[1, 2, 3], [0, 1, 1]])
    (v,) = kernel_basis(M)
    assert M.matvec(v) == (0, 0)


def test_solve_examples():
    assert solve(RationalMatrix.identity(2), (3, 5)) == (3, 5)
    assert solve(RationalMatrix([[1, 1], [1, 1]]), (1, 2)) is None
    assert solve(RationalMatrix([[2, 0], [0, 4]]), (1, 1)) == (F(1, 2), F(1, 4))
    with pytest.raises(ValueError):
        solve(RationalMatrix.identity(2), (1,))


def test_row_basis_flags_inconsistency():
    _, _, ok = row_basis(RationalMatrix([[1, 1], [2, 2]]), (1, 3))
    assert not ok
    M, b, ok = row_basis(RationalMatrix([[1, 1], [2, 2]]), (1, 2))
    assert ok and M.rows == 1 and b == (1,)


def test_matrix_is_canonical_and_hashable():
    M = RationalMatrix([[F(2, 4), 1]])
    assert M[0, 0].denominator == 2
    assert hash(M) == hash(RationalMatrix([["1/2", "1"]]))
    with pytest.raises(ValueError):
        RationalMatrix([[1, 2], [3]])


small = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def matrices(draw, max_rows=4, max_cols=5):
    m = draw(st.integers(1, max_rows))
    n = draw(st.integers(1, max_cols))
    return RationalMatrix([[draw(small) for _ in range(n)] for _ in range(m)])


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rref_idempotent(M):
    R = rref(M)[0]
    assert rref(R)[0] == R


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_kernel_vectors_annihilate_and_rank_nullity(M):
    K = kernel_basis(M)
    for v in K:
        assert all(c == 0 for c in M.matvec(v))
    assert rank(M) + len(K) == M.cols


@settings(max_examples=150, deadline=None)
@given(matrices(max_rows=5, max_cols=4), st.data())
def test_solve_round_trip(M, data):
    x = tuple(data.draw(small) for _ in range(M.cols))
    sol = solve(M, M.matvec(x))
    if rank(M) == M.cols:
        assert sol == x
    else:
        assert sol is None


@settings(max_examples=100, deadline=None)
@given(small)
def test_format_parse_round_trip(q):
    assert parse_rational(format_rational(q)) == q
