import pytest
from hypothesis import given, settings, strategies as st

from hopfjet.algcore import NotCommutative, make_algebra
from hopfjet.exactla import QQ
from hopfjet.jets import (
    NotStabilized, NotSubBimodule, first_order_jet, jet_chain, jet_hopf_algebroid, jet_space,
    jet_splitting, universal_calculus,
)

from conftest import e
from oracles import ideal_power_dims, struct_tensor


def truncated(n):
    return make_algebra(QQ, n, [(i, j, i + j, 1) for i in range(n) for j in range(n) if i + j < n],
                        [1] + [0] * (n - 1), commutative=True, name=f"Q[x]/x^{n}")


@pytest.mark.parametrize("name", ["b2", "b3", "ut2"])
def test_chain_matches_bruteforce_powers(name, request):
    b = request.getfixturevalue(name)
    assert jet_chain(b).dims(3) == ideal_power_dims(struct_tensor(b), 3)


@given(st.integers(2, 4))
@settings(max_examples=3, deadline=None)
def test_truncated_polynomial_chains(n):
    b = truncated(n)
    chain = jet_chain(b)
    # μ^{k+1} of Q[x]/x^n dies exactly at k + 1 = 2n − 1
    assert chain.stabilize() == 2 * n - 2
    assert chain.dims(2 * n - 2) == ideal_power_dims(struct_tensor(b), 2 * n - 2)


def test_b2_jets(b2):
    assert jet_chain(b2).dims(2) == [2, 1, 0]
    for k, (dj, dom) in enumerate([(2, 0), (3, 1), (4, 2)]):
        js, rep = jet_splitting(b2, k)
        assert rep.ok
        assert (js.dim, js.omega.dim) == (dj, dom)
    j = jet_hopf_algebroid(b2)
    assert j.n == 4 and j.report.ok


def test_prolongation_and_pi(b2):
    js = jet_space(b2, 1)
    x = e(1)
    # π(j(x)) = dx and incl is a section of π
    assert js.pi(js.j(x)) != {}
    assert js.check_splitting().ok


def test_first_order_jet_validation(b2):
    mu = universal_calculus(b2)
    with pytest.raises(NotSubBimodule):
        first_order_jet(b2, [{0: QQ(1)}])
    js = first_order_jet(b2, [])
    assert js.dim == 2 + len(mu)


def test_noncommutative_and_stabilization_errors(ut2, bm):
    with pytest.raises(NotCommutative):
        jet_hopf_algebroid(ut2)
    with pytest.raises(NotStabilized):
        jet_chain(bm).stabilize(cap=2)
    assert jet_chain(bm).stabilize() == 8


def test_semisimple_stabilizes_at_zero(b3):
    chain = jet_chain(b3)
    assert chain.stabilize() == 0
    assert chain.powers[0].dim == 6
