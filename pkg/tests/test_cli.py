import json
import subprocess
import sys

import pytest

from hopfjet.cli import EXIT_FAIL, EXIT_INPUT, EXIT_PASS, main


def run_json(capsys, *argv):
    code = main(list(argv) + ["--json"])
    out = capsys.readouterr().out
    return code, json.loads(out), out


def test_verify_pair_passes(capsys):
    code, rep, _ = run_json(capsys, "verify", "b3.json", "--pair")
    assert code == EXIT_PASS and rep["status"] == "pass"
    assert rep["schema"] == "hopfjet.report/1"
    assert all(c["status"] == "pass" for c in rep["checks"])


def test_json_is_deterministic(capsys):
    _, _, first = run_json(capsys, "verify", "b2.json", "--pair")
    _, _, second = run_json(capsys, "verify", "b2.json", "--pair")
    assert first == second


@pytest.mark.parametrize("argv, code, failure", [
    (["verify", "bad_unit.json"], EXIT_INPUT, "BadUnit"),
    (["verify", "broken_counit.json"], EXIT_FAIL, "AxiomFailure"),
    (["cotwist", "h_k4.json", "rank_deficient.json"], EXIT_FAIL, "NotInvertibleCocycle"),
    (["quantize", "b3.json"], EXIT_FAIL, "ConformanceFailure"),
    (["verify", "no_such_file.json"], EXIT_INPUT, "InputError"),
])
def test_failure_codes(capsys, argv, code, failure):
    got, rep, _ = run_json(capsys, *argv)
    assert got == code
    found = (rep.get("failure") or {}).get("code") or (rep.get("error") or {}).get("code")
    assert found == failure


def test_malformed_input(capsys, tmp_path):
    p = tmp_path / "junk.json"
    p.write_text("{not json")
    assert main(["verify", str(p)]) == EXIT_INPUT
    p.write_text(json.dumps({"kind": "algebra", "dim": 2}))
    assert main(["verify", str(p)]) == EXIT_INPUT
    assert main(["frobnicate"]) == EXIT_INPUT
    capsys.readouterr()


def test_failure_carries_witness(capsys):
    _, rep, _ = run_json(capsys, "verify", "broken_counit.json")
    assert rep["failure"]["witness"] == [1, 2]
    main(["verify", "broken_counit.json"])
    assert "failure: AxiomFailure" in capsys.readouterr().out


def test_field_override(capsys):
    code, rep, _ = run_json(capsys, "--field", "Fp:7", "verify", "b2.json", "--pair")
    assert code == EXIT_PASS
    code, _, _ = run_json(capsys, "verify", "b2.json", "--pair", "--field", "Fp:7")
    assert code == EXIT_PASS
    assert main(["--field", "Fp:8", "verify", "b2.json"]) == EXIT_INPUT
    capsys.readouterr()


def test_jet_table(capsys):
    code, rep, _ = run_json(capsys, "jet", "b2.json")
    assert code == EXIT_PASS
    rows = [(r["k"], r["dim mu_k"], r["dim J^k"], r["dim Omega1_k"], r["Hopf ideal"])
            for r in rep["dimensions"]["rows"]]
    assert rows == [(0, 2, 2, 0, True), (1, 1, 3, 1, False), (2, 0, 4, 2, True)]
    assert rep["dimensions"]["dim J"] == 4


def test_hopf_compare(capsys):
    code, rep, _ = run_json(capsys, "cotwist", "h_k4.json", "sign.json", "--checks", "hopf-compare")
    assert code == EXIT_PASS
    assert any(line.startswith("ψ = ") for line in rep["lines"])


def test_trivial_cotwist_of_pair(capsys):
    code, rep, _ = run_json(capsys, "cotwist", "b2.json", "trivial.json")
    assert code == EXIT_PASS
    assert any(c["name"] == "L^ε̂ structurally equals L" and c["status"] == "pass" for c in rep["checks"])


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "hopfjet", "verify", "bad_unit.json"],
                         capture_output=True, text=True)
    assert out.returncode == EXIT_INPUT
    assert "BadUnit" in out.stdout
