from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from hopfjet.exactla import (
    Field, NoSolution, QQ, Subspace, kernel_basis, make_quotient, rank, rref, solve, solve_many,
    subspace_intersect, subspace_sum,
)

small = st.integers(min_value=-3, max_value=3)


def mats(max_rows=5, max_cols=5):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)))


def to_flint(rows, fld=QQ):
    return fld.from_rows([[fld(x) for x in r] for r in rows])


@given(mats())
@settings(max_examples=60, deadline=None)
def test_rank_matches_sympy(rows):
    assert rank(to_flint(rows)) == sp.Matrix(rows).rank()


@given(mats())
@settings(max_examples=60, deadline=None)
def test_kernel_is_kernel_of_right_size(rows):
    m = to_flint(rows)
    ker = kernel_basis(m)
    assert len(ker) == m.ncols() - sp.Matrix(rows).rank()
    for v in ker:
        for r in rows:
            assert sum(Fraction(int(x)) * Fraction(int(y.p), int(y.q)) for x, y in zip(r, v)) == 0


@given(mats(), st.lists(small, min_size=5, max_size=5))
@settings(max_examples=60, deadline=None)
def test_solve_consistent_systems(rows, xs):
    m = to_flint(rows)
    x = [QQ(v) for v in xs[: m.ncols()]]
    b = [sum((QQ(r[j]) * x[j] for j in range(m.ncols())), QQ(0)) for r in rows]
    sol = solve(m, b)
    for r, bi in zip(rows, b):
        assert sum((QQ(r[j]) * sol[j] for j in range(m.ncols())), QQ(0)) == bi


def test_solve_inconsistent():
    m = to_flint([[1, 1], [2, 2]])
    with pytest.raises(NoSolution):
        solve(m, [1, 3])
    with pytest.raises(NoSolution):
        solve_many(m, to_flint([[1], [3]]))


def test_rref_pivots():
    r, piv = rref(to_flint([[0, 2, 4], [0, 1, 2], [1, 0, 1]]))
    assert piv == [0, 1]
    assert r[1, 2] == 2


@given(mats(4, 6))
@settings(max_examples=40, deadline=None)
def test_quotient_project_lift_roundtrip(rows):
    q = make_quotient(len(rows[0]), [[QQ(x) for x in r] for r in rows])
    assert q.dim == len(rows[0]) - sp.Matrix(rows).rank()
    for j in range(q.dim):
        assert q.project(q.section(j)) == {j: QQ(1)}
    for r in rows:
        assert q.project({i: QQ(x) for i, x in enumerate(r) if x}) == {}


def test_subspace_ops():
    a = Subspace(QQ, 3, [{0: QQ(1)}, {1: QQ(1)}])
    b = Subspace(QQ, 3, [{1: QQ(1)}, {2: QQ(1)}])
    assert subspace_intersect(a, b).dim == 1
    assert subspace_sum(a, b).dim == 3
    assert a.contains({0: QQ(2), 1: QQ(-1)})
    assert not a.contains({2: QQ(1)})


def test_finite_field():
    f7 = Field.parse("Fp:7")
    assert f7(3, 2) * f7(2) == f7(3)
    m = to_flint([[1, 2], [3, 6]], f7)
    assert rank(m) == 1
    with pytest.raises(ValueError):
        Field.Fp(8)
    with pytest.raises(ZeroDivisionError):
        f7(1, 7)


def test_field_pairs_exact():
    assert QQ.to_pair(QQ(3, 6)) == (1, 2)
    assert QQ(Fraction(-4, 6)) == QQ(-2, 3)
