import pytest
from hypothesis import given, settings, strategies as st

from hopfjet.algcore import make_algebra
from hopfjet.algebroid import (
    AxiomFailure, antipode, check_hopf_ideal, hopf_algebra_bialgebroid, lambda_map,
    quotient_hopf_algebroid, verify_translation_identities,
)
from hopfjet.cli import load_structure
from hopfjet.exactla import QQ
from hopfjet.jets import d_uni, jet_chain, pair_closed_forms, pair_hopf_algebroid

from conftest import e


@pytest.mark.parametrize("name", ["b2", "b3", "ut2"])
def test_pair_algebroid_suite(name, request):
    b = request.getfixturevalue(name)
    l = pair_hopf_algebroid(b)
    assert l.n == b.dim ** 2
    assert l.report.ok
    assert verify_translation_identities(l).ok
    assert pair_closed_forms(l, b).ok


def test_translation_map_inverts_lambda(b2):
    l = pair_hopf_algebroid(b2)
    for X in range(l.n):
        img = lambda_map(l, l.tm.reps[X])
        assert l.diamond.project(img) == l.diamond.project(l.t2(e(X), l.one()))


def test_broken_counit_is_rejected():
    with pytest.raises(AxiomFailure) as exc:
        load_structure("broken_counit.json", strict=True)
    assert exc.value.witness is not None
    rep = load_structure("broken_counit.json", strict=False).report
    assert {c.name for c in rep.failures} >= {"counit laws"}


def test_group_algebra_antipode(k4):
    S = antipode(k4)
    assert S == [e(i) for i in range(4)]


@given(st.integers(2, 6))
@settings(max_examples=5, deadline=None)
def test_cyclic_group_algebras(n):
    alg = make_algebra(QQ, n, [(i, j, (i + j) % n, 1) for i in range(n) for j in range(n)],
                       [1] + [0] * (n - 1), commutative=True)
    h = hopf_algebra_bialgebroid(alg, [{i * n + i: QQ(1)} for i in range(n)], [QQ(1)] * n)
    assert verify_translation_identities(h).ok
    assert antipode(h) == [e((-i) % n) for i in range(n)]


def test_semisimple_jet_quotient(b3):
    pair = pair_hopf_algebroid(b3)
    chain = jet_chain(b3)
    rep, ideal = check_hopf_ideal(pair, chain.extend(0).basis)
    assert rep.ok and ideal.dim == 6
    j = quotient_hopf_algebroid(pair, ideal.basis)
    assert j.n == 3 and j.report.ok


def test_mu_squared_of_b2_is_not_a_coideal(b2):
    # Δ(dx·dx) carries the cross term 2 dx⋄dx, which leaves μ²⋄L + L⋄μ²
    pair = pair_hopf_algebroid(b2)
    chain = jet_chain(b2)
    mu2 = chain.extend(1)
    assert mu2.dim == 1
    rep, _ = check_hopf_ideal(pair, mu2.basis)
    assert not rep.get("coideal").ok
    dx = d_uni(b2, e(1))
    env = pair.total
    assert mu2.contains(env.mul(dx, dx))
