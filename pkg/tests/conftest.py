import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hopfjet.cli import load_algebra, load_structure  # noqa: E402
from hopfjet.exactla import QQ  # noqa: E402

# one line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])


@pytest.fixture(scope="session")
def b2():
    return load_algebra("b2.json")


@pytest.fixture(scope="session")
def b3():
    return load_algebra("b3.json")


@pytest.fixture(scope="session")
def bm():
    return load_algebra("bm.json")


@pytest.fixture(scope="session")
def ut2():
    return load_algebra("ut2.json")


@pytest.fixture(scope="session")
def k4():
    return load_structure("h_k4.json", strict=True)


@pytest.fixture(scope="session")
def jbm():
    return load_structure("jbm.json", strict=True)


@pytest.fixture(scope="session")
def dbm(bm):
    from hopfjet.duality import diff_bialgebroid
    return diff_bialgebroid(bm)


@pytest.fixture(scope="session")
def moyal1(bm, jbm, dbm):
    from hopfjet.duality import quantized_jet
    return quantized_jet(bm, bm.derivations, 1, jl=jbm, lam=dbm)


@pytest.fixture(scope="session")
def quintic():
    """Q[x]/(x⁵) with the derivation x²∂x used twice."""
    from hopfjet.algcore import make_algebra
    mul = [(i, j, i + j, 1) for i in range(5) for j in range(5) if i + j < 5]
    alg = make_algebra(QQ, 5, mul, [1, 0, 0, 0, 0], names=["1", "x", "x^2", "x^3", "x^4"], name="Q5",
                       commutative=True)
    # x^k ↦ k x^{k+1}
    D = {(k + 1) * 5 + k: QQ(k) for k in range(1, 4)}
    alg.derivations = [D, dict(D)]
    return alg


def e(i):
    return {i: QQ(1)}
