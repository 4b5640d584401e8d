"""One test per acceptance criterion, each built from freshly loaded fixtures and timed end to end.

A summary line per criterion is printed at the end of the pytest run.
"""
import json
import time
from contextlib import contextmanager

import pytest

import conftest
from conftest import e
from oracles import diff_dims, ideal_power_dims, struct_tensor

from hopfjet.algebroid import AxiomFailure, verify_translation_identities
from hopfjet.cli import load_algebra, load_cocycle, load_structure, main
from hopfjet.cotwist import (
    NotInvertibleCocycle, check_invertible, compose_cocycles, cotwist, hopf_case_compare, inverse_cocycle,
    sharp_product_report, trivial_cocycle,
)
from hopfjet.duality import (
    canonical_pairing, check_xu_cocycle, diff_bialgebroid, dualize_cocycle, jet_diff_iso, moyal_F,
    pairing_report, quantized_jet, twist_bialgebroid_by_F, twisted_pairing, twisted_pairing_closed_form,
)
from hopfjet.algcore import BadUnit
from hopfjet.exactla import QQ, sp_add
from hopfjet.jets import jet_chain, jet_hopf_algebroid, jet_splitting, pair_closed_forms, pair_hopf_algebroid


@contextmanager
def criterion(n, title, limit):
    state = {"ok": False}
    t0 = time.perf_counter()
    try:
        yield state
    finally:
        dt = time.perf_counter() - t0
        in_time = limit is None or dt < limit
        verdict = "PASS" if state["ok"] and in_time else "FAIL"
        bound = f", limit {limit:g} s" if limit else ""
        late = "" if in_time else " (over time limit)"
        conftest.ACCEPTANCE[n] = f"criterion {n}: {verdict}  {title}  [{dt:.2f} s{bound}]{late}"
    assert in_time, f"criterion {n} took {dt:.1f} s, limit {limit} s"


def test_criterion_1_pair_algebroids():
    with criterion(1, "pair Hopf algebroids of B3 and B2: axioms, ten translation identities, closed forms",
                   5) as c:
        for name, n in (("b3.json", 9), ("b2.json", 4)):
            b = load_algebra(name)
            l = pair_hopf_algebroid(b)
            assert l.n == n and l.report.ok
            ids = verify_translation_identities(l)
            assert len(ids.checks) == 10 and ids.ok
            assert pair_closed_forms(l, b).ok
        c["ok"] = True


def test_criterion_2_jet_chain_oracle():
    with criterion(2, "B2 jet chain against brute-force ideal powers and splittings", 1) as c:
        b = load_algebra("b2.json")
        assert ideal_power_dims(struct_tensor(b), 2) == [2, 1, 0]
        assert jet_chain(b).dims(2) == [2, 1, 0]
        dims = {}
        for k in range(4):
            js, rep = jet_splitting(b, k)
            assert rep.ok
            dims[k] = (js.dim, b.dim, js.omega.dim)
        assert dims[1] == (3, 2, 1)
        assert dims[2] == dims[3] == (4, 2, 2)
        assert jet_hopf_algebroid(b).n == b.dim ** 2
        c["ok"] = True


def test_criterion_3_diff_jet_duality():
    with criterion(3, "Diff^k ≅ Hom(J^k, B) for B2 (dims 2, 3, 4) and upper-triangular 2×2", 5) as c:
        for name, want in (("b2.json", [2, 3, 4]), ("ut2.json", None)):
            b = load_algebra(name)
            oracle = diff_dims(struct_tensor(b), 2)
            if want:
                assert oracle == want
            for k in range(3):
                iso = jet_diff_iso(b, k)
                assert iso.report.ok
                assert iso.diff.dim == len(iso.hom) == oracle[k]
        c["ok"] = True


def test_criterion_4_canonical_pairing():
    with criterion(4, "canonical pairing ⟨D|[a⊗b]⟩ = D(a)b on B2 and BM, all five axioms", 30) as c:
        for name in ("b2.json", "bm.json"):
            b = load_algebra(name)
            p = canonical_pairing(diff_bialgebroid(b), jet_hopf_algebroid(b))
            rep = pairing_report(p)
            assert rep.ok, rep.failures
        c["ok"] = True


def _commutator(alg, x, y):
    out = alg.mul(x, y)
    sp_add(out, alg.mul(y, x), QQ(-1))
    return out


def test_criterion_5_moyal_cotwist():
    with criterion(5, "J(BM)^Γ re-verified, seven closed forms, x·y − y·x = x²y²", 120) as c:
        bm = load_algebra("bm.json")
        q = quantized_jet(bm, bm.derivations, 1)
        lg = q.cotwisted
        assert lg.report.ok
        assert verify_translation_identities(lg).ok
        assert len(q.report.checks) == 7 and q.report.ok
        x, y = e(bm.names.index("x")), e(bm.names.index("y"))
        assert _commutator(lg.base, x, y) == e(bm.names.index("x^2y^2"))
        c["ok"] = True


def test_criterion_6_groupoid_laws():
    with criterion(6, "cocycle groupoid laws on the Moyal fixture chained with θ = 2", 120) as c:
        bm = load_algebra("bm.json")
        E, E2 = bm.derivations
        q = quantized_jet(bm, bm.derivations, 1)
        gamma, l, lg = q.gamma, q.jet, q.cotwisted
        sigma = q.report.sigma
        assert compose_cocycles(gamma, sigma).table == trivial_cocycle(l).table
        assert compose_cocycles(sigma, gamma).table == trivial_cocycle(lg).table
        assert inverse_cocycle(sigma).table == gamma.table
        assert cotwist(sigma).structure_equal(l)
        # second cocycle Π on L^Γ, dualized from the θ = 2 Moyal element on D(BM)^F
        lf = twist_bialgebroid_by_F(q.F)
        tp = twisted_pairing(q.F, q.pairing, lam_f=lf, l_gamma=lg)
        F2 = check_xu_cocycle(lf, moyal_F(q.diff, E, E2, 2), name="F(θ=2)")
        pi = dualize_cocycle(F2, tp)
        comp = compose_cocycles(gamma, pi)
        assert cotwist(comp).structure_equal(cotwist(pi))
        assert sharp_product_report(gamma, pi, comp).ok
        assert sharp_product_report(gamma, sigma).ok
        c["ok"] = True


def test_criterion_7_hopf_reduction():
    with criterion(7, "Q[Z2×Z2] sign cocycle: ψ bijective algebra and coalgebra map onto the Drinfeld cotwist",
                   1) as c:
        h = load_structure("h_k4.json", strict=True)
        gamma, _ = load_cocycle("sign.json", h)
        rep = hopf_case_compare(gamma)
        for name in ("ψ bijective", "ψ algebra map", "ψ unital", "ψ coalgebra map"):
            assert rep.get(name).ok
        assert rep.ok
        c["ok"] = True


def test_criterion_8_twisted_pairing():
    with criterion(8, "twisted pairing between D(BM)^F and J(BM)^Γ: five axioms and D(a)∗b", 120) as c:
        bm = load_algebra("bm.json")
        q = quantized_jet(bm, bm.derivations, 1)
        lf = twist_bialgebroid_by_F(q.F)
        assert lf.report.ok
        tp = twisted_pairing(q.F, q.pairing, lam_f=lf, l_gamma=q.cotwisted)
        rep = pairing_report(tp)
        assert rep.ok, rep.failures
        assert twisted_pairing_closed_form(tp, q).ok
        c["ok"] = True


def _cli(capsys, *argv):
    code = main(list(argv) + ["--json"])
    out = capsys.readouterr().out
    return code, out, json.loads(out)


def test_criterion_9_negative_paths(capsys):
    with criterion(9, "corrupted fixtures fail with the designated error, witness and exit code", None) as c:
        with pytest.raises(BadUnit) as exc:
            load_algebra("bad_unit.json")
        assert exc.value.witness
        with pytest.raises(AxiomFailure) as exc:
            load_structure("broken_counit.json", strict=True)
        assert exc.value.witness
        h = load_structure("h_k4.json", strict=True)
        gamma, _ = load_cocycle("rank_deficient.json", h)
        assert not check_invertible(gamma)
        with pytest.raises(NotInvertibleCocycle):
            cotwist(gamma)
        cases = [
            (["verify", "bad_unit.json"], 2, "error", "BadUnit"),
            (["verify", "broken_counit.json"], 1, "failure", "AxiomFailure"),
            (["cotwist", "h_k4.json", "rank_deficient.json"], 1, "failure", "NotInvertibleCocycle"),
        ]
        for argv, code, key, name in cases:
            got, out, rep = _cli(capsys, *argv)
            assert got == code and rep["exit_code"] == code
            assert rep[key]["code"] == name and rep[key]["witness"]
            assert _cli(capsys, *argv)[1] == out
        assert _cli(capsys, "verify", "b3.json", "--pair")[0] == 0
        c["ok"] = True
