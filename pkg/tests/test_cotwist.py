import pytest
from hypothesis import given, settings, strategies as st

from hopfjet.algcore import make_algebra
from hopfjet.algebroid import hopf_algebra_bialgebroid, verify_translation_identities
from hopfjet.cli import load_cocycle
from hopfjet.cotwist import (
    CocycleConditionFailed, Cocycle, CounitConditionFailed, HostMismatch, NotInvertibleCocycle,
    check_cocycle, check_invertible, coherence_report, compose_cocycles, cotwist, default_family,
    hopf_case_compare, inverse_cocycle, monoidal_report, sharp_product_report, square_report,
    trivial_cocycle, verify_comodule,
)
from hopfjet.exactla import QQ
from hopfjet.jets import jet_hopf_algebroid, pair_hopf_algebroid


def group_algebra(n):
    alg = make_algebra(QQ, n, [(i, j, (i + j) % n, 1) for i in range(n) for j in range(n)],
                       [1] + [0] * (n - 1), commutative=True, name=f"Z{n}")
    return hopf_algebra_bialgebroid(alg, [{i * n + i: QQ(1)} for i in range(n)], [QQ(1)] * n)


@pytest.mark.parametrize("which", ["pair", "jet"])
def test_trivial_cocycle_reproduces_host(b2, which):
    l = pair_hopf_algebroid(b2) if which == "pair" else jet_hopf_algebroid(b2)
    gamma = check_cocycle(l, trivial_cocycle(l))
    assert gamma.report.ok and check_invertible(gamma)
    lg = cotwist(gamma)
    assert lg.structure_equal(l)
    assert square_report(gamma, lg).ok
    assert verify_translation_identities(lg).ok


def test_default_family_are_comodules(b2):
    l = jet_hopf_algebroid(b2)
    for M in default_family(l):
        assert verify_comodule(M).ok, M.name


def test_sign_cocycle_matches_drinfeld(k4):
    gamma, _ = load_cocycle("sign.json", k4)
    assert gamma.report.ok
    rep = hopf_case_compare(gamma)
    assert rep.ok
    # ψ sends ab to −ab and fixes the other group elements
    assert rep.psi[3] == {3: QQ(-1)}
    assert all(rep.psi[i] == {i: QQ(1)} for i in range(3))


def test_rank_deficient_is_not_invertible(k4):
    gamma, _ = load_cocycle("rank_deficient.json", k4)
    assert gamma.report.ok
    assert not check_invertible(gamma)
    with pytest.raises(NotInvertibleCocycle):
        cotwist(gamma)


def test_bad_tables_rejected():
    l = group_algebra(3)
    one = {0: QQ(1)}
    table = [[dict(one) for _ in range(3)] for _ in range(3)]
    table[1][1] = {0: QQ(2)}
    with pytest.raises(CocycleConditionFailed):
        check_cocycle(l, table)
    table = [[dict(one) for _ in range(3)] for _ in range(3)]
    table[0][2] = {0: QQ(3)}
    with pytest.raises(CounitConditionFailed):
        check_cocycle(l, table)


@given(st.integers(2, 4), st.lists(st.integers(1, 5), min_size=3, max_size=3), st.booleans())
@settings(max_examples=8, deadline=None)
def test_coboundaries_on_cyclic_groups(n, vals, neg):
    l = group_algebra(n)
    f = [QQ(1)] + [QQ(v) * (-1 if neg else 1) for v in vals[: n - 1]]
    table = [[{0: f[g] * f[h] / f[(g + h) % n]} for h in range(n)] for g in range(n)]
    gamma = check_cocycle(l, table)
    rep = hopf_case_compare(gamma)
    assert rep.ok
    # the Drinfeld cotwist of an abelian group algebra is the algebra itself, and ψ carries L^Γ onto it
    assert rep.drinfeld.table == l.total.table
    sigma = inverse_cocycle(gamma)
    assert compose_cocycles(gamma, sigma).table == trivial_cocycle(l).table


@pytest.fixture(scope="module")
def quintic_moyal(quintic):
    from hopfjet.duality import canonical_pairing, check_xu_cocycle, diff_bialgebroid, dualize_cocycle, moyal_F
    jl = jet_hopf_algebroid(quintic)
    lam = diff_bialgebroid(quintic)
    D1, D2 = quintic.derivations
    F = check_xu_cocycle(lam, moyal_F(lam, D1, D2, QQ(1)), name="F")
    return dualize_cocycle(F, canonical_pairing(lam, jl))


def test_moyal_cotwist_full_family(quintic_moyal):
    gamma = quintic_moyal
    lg = cotwist(gamma)
    assert square_report(gamma, lg).ok
    fam = default_family(gamma.host)
    for M in fam:
        for N in fam:
            assert monoidal_report(gamma, M, N).ok, (M.name, N.name)
            for P in fam:
                assert coherence_report(gamma, M, N, P).ok, (M.name, N.name, P.name)


def test_moyal_groupoid_laws(quintic_moyal):
    gamma = quintic_moyal
    l, lg = gamma.host, cotwist(gamma)
    sigma = inverse_cocycle(gamma)
    assert compose_cocycles(gamma, sigma).table == trivial_cocycle(l).table
    assert compose_cocycles(sigma, gamma).table == trivial_cocycle(lg).table
    assert inverse_cocycle(sigma).table == gamma.table
    assert cotwist(sigma).structure_equal(l)
    assert sharp_product_report(gamma, sigma).ok
    assert not lg.structure_equal(l)
    with pytest.raises(HostMismatch):
        compose_cocycles(gamma, gamma)


def test_cocycle_called_on_vectors(k4):
    gamma, _ = load_cocycle("sign.json", k4)
    assert isinstance(gamma, Cocycle)
    x = {2: QQ(1), 3: QQ(2)}
    expect = {0: gamma.table[2][1][0] + 2 * gamma.table[3][1][0]}
    assert gamma(x, {1: QQ(1)}) == expect
