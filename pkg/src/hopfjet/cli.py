"""Command line front end: verify, jet, cotwist, quantize.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for input errors.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .algcore import AlgebraError, Report, _jsonable, make_algebra
from .algebroid import hopf_algebra_bialgebroid, verify_translation_identities
from .cotwist import (
    Cocycle, check_cocycle, check_invertible, coherence_report, compose_cocycles, cotwist,
    default_family, hopf_case_compare, inverse_cocycle, monoidal_report, sharp_product_report,
    square_report, trivial_cocycle,
)
from .duality import (
    ConformanceFailure, canonical_pairing, check_xu_cocycle, commutator, diff_bialgebroid,
    dualize_cocycle, moyal_F, quantized_jet, twist_bialgebroid_by_F, twisted_pairing,
    twisted_pairing_closed_form,
)
from .exactla import Field
from .jets import (
    STABILIZATION_CAP, jet_chain, jet_hopf_algebroid, pair_closed_forms, pair_hopf_algebroid,
)
from .algebroid import check_hopf_ideal

SCHEMA = "hopfjet.report/1"
EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
# largest ambient tensor dimension for the colinearity and coherence suites
MONOIDAL_LIMIT = 1024
COHERENCE_LIMIT = 6561


class InputError(Exception):
    """Unreadable or malformed input file."""


# ------------------------------------------------------------ loading

def fixture_path(name):
    """Path of a packaged fixture, e.g. ``fixture_path("b2.json")``."""
    return Path(str(resources.files("hopfjet") / "data" / name))


def resolve(path, relative_to=None):
    p = Path(path)
    if p.exists():
        return p
    if relative_to is not None and (Path(relative_to).parent / p).exists():
        return Path(relative_to).parent / p
    packaged = fixture_path(p.name)
    if packaged.exists():
        return packaged
    raise InputError(f"no such file: {path}")


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc


def _coef(fld, x):
    if isinstance(x, (list, tuple)):
        num, den = x
        return fld(int(num), int(den))
    if isinstance(x, str):
        return fld(Fraction(x))
    return fld(int(x))


def algebra_from_obj(obj, field=None):
    try:
        fld = field or Field.parse(obj.get("field", "Q"))
        dim = int(obj["dim"])
        mul = [(int(e[0]), int(e[1]), int(e[2]), _coef(fld, e[3:5] if len(e) > 4 else e[3]))
               for e in obj["mul"]]
        unit = {i: _coef(fld, u) for i, u in enumerate(obj["unit"]) if _coef(fld, u) != 0}
        names = obj.get("basis")
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise InputError(f"malformed algebra: {exc!r}") from exc
    alg = make_algebra(fld, dim, mul, unit, names=names, name=obj.get("name", ""),
                       commutative=obj.get("commutative"))
    ders = []
    for der in obj.get("derivations", []):
        D = {}
        for row, col, num, den in der["entries"]:
            D[int(row) * dim + int(col)] = fld(int(num), int(den))
        ders.append(D)
    alg.derivations = ders
    return alg


def load_algebra(path, field=None):
    p = resolve(path)
    obj = load_json(p)
    if obj.get("kind", "algebra") not in ("algebra", "hopf_algebra"):
        raise InputError(f"{p.name} is a {obj.get('kind')} file, not an algebra")
    return algebra_from_obj(obj, field)


def load_structure(path, field=None, pair=True, strict=False):
    """Bialgebroid described by a file: plain algebras give their pair algebroid."""
    p = resolve(path)
    obj = load_json(p)
    kind = obj.get("kind", "algebra")
    if kind == "algebra":
        alg = algebra_from_obj(obj, field)
        return pair_hopf_algebroid(alg, strict=strict) if pair else alg
    if kind == "hopf_algebra":
        alg = algebra_from_obj(obj, field)
        n = alg.dim
        cop = [{} for _ in range(n)]
        try:
            for i, j, k, num, den in obj["coproduct"]:
                cop[i][j * n + k] = alg.field(int(num), int(den))
            counit = [_coef(alg.field, c) for c in obj["counit"]]
        except (KeyError, ValueError, TypeError) as exc:
            raise InputError(f"malformed Hopf algebra: {exc!r}") from exc
        return hopf_algebra_bialgebroid(alg, cop, counit, strict=strict)
    if kind in ("jet", "pair"):
        alg = algebra_from_obj(load_json(resolve(obj["algebra"], p)), field)
        if kind == "pair":
            return pair_hopf_algebroid(alg, strict=strict)
        return jet_hopf_algebroid(alg, strict=strict)
    raise InputError(f"unknown structure kind {kind!r}")


def load_cocycle(path, host):
    """Returns (cocycle, context) where context holds dualization data when present."""
    p = resolve(path)
    obj = load_json(p)
    kind = obj.get("kind")
    fld = host.field
    if kind == "trivial":
        return check_cocycle(host, trivial_cocycle(host), strict=False), {}
    if kind == "matrix":
        try:
            table = [[{c: _coef(fld, v) for c, v in enumerate(cell) if _coef(fld, v) != 0} for cell in row]
                     for row in obj["matrix"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed cocycle matrix: {exc!r}") from exc
        if len(table) != host.n or any(len(r) != host.n for r in table):
            raise InputError(f"cocycle matrix is not {host.n}×{host.n}")
        return check_cocycle(host, Cocycle(host, table, name=p.stem), strict=False), {}
    if kind == "dualized":
        b = getattr(host, "jet_base", None)
        if b is None:
            raise InputError("a dualized cocycle needs a jet algebroid host")
        recipe = obj.get("F", {})
        theta = Fraction(*recipe.get("theta", [1, 1])) if isinstance(recipe.get("theta"), list) \
            else Fraction(str(recipe.get("theta", 1)))
        ders = b.derivations if recipe.get("derivations", "algebra") == "algebra" else [
            {int(r) * b.dim + int(c): fld(int(nu), int(de)) for r, c, nu, de in D}
            for D in recipe["derivations"]]
        if len(ders) != 2:
            raise ConformanceFailure("no nilpotent derivation recipe applies", witness=["need two derivations"])
        lam = diff_bialgebroid(b)
        F = check_xu_cocycle(lam, moyal_F(lam, ders[0], ders[1], theta), name=f"F(θ={theta})")
        pairing = canonical_pairing(lam, host)
        gamma = dualize_cocycle(F, pairing, strict=False, check_family=False)
        return gamma, {"diff": lam, "F": F, "pairing": pairing, "theta": theta}
    raise InputError(f"unknown cocycle kind {kind!r}")


# ------------------------------------------------------------ results

class Result:
    def __init__(self, command, fixtures):
        self.command = command
        self.fixtures = [Path(f).name for f in fixtures]
        self.reports = []
        self.dimensions = {}
        self.lines = []
        self.error = None
        self.failure = None
        self.timing = 0.0

    def stop(self, code, rep):
        """Record the designated error for a failed report."""
        bad = rep.failures[0]
        self.failure = {"code": code, "check": bad.name, "witness": _jsonable(bad.witness)}

    def add(self, rep):
        self.reports.append(rep)
        return rep

    def fail(self, exc):
        code = getattr(exc, "code", type(exc).__name__)
        rep = Report(code)
        rep.add(code, False, getattr(exc, "witness", None), str(exc))
        self.reports.append(rep)
        self.failure = {"code": code, "check": str(exc), "witness": _jsonable(getattr(exc, "witness", None))}

    @property
    def ok(self):
        return self.error is None and all(r.ok for r in self.reports)

    def exit_code(self):
        if self.error is not None:
            return EXIT_INPUT
        return EXIT_PASS if self.ok else EXIT_FAIL

    def to_dict(self):
        checks = []
        for r in self.reports:
            for c in r.to_dict()["checks"]:
                c["suite"] = r.title
                checks.append(c)
        out = {
            "schema": SCHEMA,
            "command": self.command,
            "fixtures": self.fixtures,
            "status": "error" if self.error else ("pass" if self.ok else "fail"),
            "exit_code": self.exit_code(),
            "checks": checks,
            "dimensions": _jsonable(self.dimensions),
            "lines": self.lines,
        }
        if self.error:
            out["error"] = self.error
        if self.failure:
            out["failure"] = self.failure
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False)

    def to_text(self):
        out = []
        if self.error:
            out.append(f"error: {self.error['code']}: {self.error['message']}")
            if self.error.get("witness") is not None:
                out.append(f"  witness: {json.dumps(self.error['witness'], ensure_ascii=False)}")
            return "\n".join(out)
        for r in self.reports:
            out.append(f"== {r.title}")
            for c in r.checks:
                line = f"  {'PASS' if c.ok else 'FAIL'}  {c.name}"
                if not c.ok and c.witness is not None:
                    line += f"  witness={json.dumps(_jsonable(c.witness), ensure_ascii=False)}"
                if not c.ok and c.note:
                    line += f"  ({c.note})"
                out.append(line)
        for k, v in self.dimensions.items():
            out.append(f"{k}: {json.dumps(_jsonable(v), ensure_ascii=False)}")
        out.extend(self.lines)
        if self.failure:
            f = self.failure
            out.append(f"failure: {f['code']} at {f['check']!r} witness={json.dumps(f['witness'], ensure_ascii=False)}")
        n = sum(len(r.checks) for r in self.reports)
        bad = sum(len(r.failures) for r in self.reports)
        out.append(f"result: {'pass' if self.ok else 'fail'} ({n - bad}/{n} checks, {self.timing:.2f}s)")
        return "\n".join(out)


def _fmt(alg, vec):
    if not vec:
        return "0"
    parts = []
    for i in sorted(vec):
        c = alg.field.to_str(vec[i]) if hasattr(alg.field, "to_str") else str(vec[i])
        name = alg.names[i]
        if c == "1":
            parts.append(name)
        elif c == "-1":
            parts.append(f"-{name}")
        else:
            parts.append(f"{c}*{name}")
    return " + ".join(parts).replace("+ -", "- ")


# ------------------------------------------------------------ commands

def cmd_verify(args, res):
    field = args.field
    obj = load_json(resolve(args.file))
    kind = obj.get("kind", "algebra")
    if kind == "algebra" and not args.pair:
        alg = algebra_from_obj(obj, field)
        rep = res.add(Report(f"algebra {alg.name}"))
        rep.add("associative", True)
        rep.add("unit", True)
        res.dimensions["dim"] = alg.dim
        return
    l = load_structure(args.file, field, pair=True, strict=False)
    res.add(l.report)
    res.dimensions["base dim"] = l.d
    res.dimensions["total dim"] = l.n
    if not l.report.ok:
        res.stop("AxiomFailure", l.report)
        return
    res.add(verify_translation_identities(l))
    if kind == "algebra":
        res.add(pair_closed_forms(l, l.base))


def cmd_jet(args, res):
    alg = load_algebra(args.file, args.field)
    chain = jet_chain(alg)
    pair = pair_hopf_algebroid(alg)
    d = alg.dim
    rows = []
    k = 0
    while chain.stabilized_at is None and k <= args.max_k:
        chain.extend(k + 1)
        k += 1
    rep = res.add(Report(f"jet chain {alg.name}"))
    stab = chain.stabilized_at
    ok = stab is not None and stab <= args.max_k
    rep.add(f"stabilization within k ≤ {args.max_k}", ok, None if ok else [args.max_k], "NotStabilized" if not ok else "")
    top = stab if ok else args.max_k
    mu = chain.powers[0].dim
    for j in range(top + 1):
        mk = chain.powers[j]
        hrep, _ = check_hopf_ideal(pair, mk.basis)
        rows.append({"k": j, "dim mu_k": mk.dim, "dim J^k": d * d - mk.dim, "dim Omega1_k": mu - mk.dim,
                     "Hopf ideal": hrep.ok})
    res.dimensions["rows"] = rows
    res.lines.append("k  dim mu_k  dim J^k  dim Omega1_k  Hopf ideal")
    for r in rows:
        res.lines.append(f"{r['k']:<2} {r['dim mu_k']:<9} {r['dim J^k']:<8} {r['dim Omega1_k']:<13} "
                         f"{'yes' if r['Hopf ideal'] else 'no'}")
    if not ok:
        return
    res.dimensions["stabilized at"] = stab
    res.dimensions["dim mu_inf"] = chain.powers[stab].dim
    rep.add("μ_∞ is a Hopf ideal", rows[-1]["Hopf ideal"], None if rows[-1]["Hopf ideal"] else [stab])
    res.lines.append(f"stabilized at k = {stab}, dim μ_∞ = {chain.powers[stab].dim}")
    if alg.commutative and rows[-1]["Hopf ideal"]:
        jl = jet_hopf_algebroid(alg, strict=False)
        res.add(jl.report)
        res.dimensions["dim J"] = jl.n
        res.lines.append(f"dim J({alg.name}) = {jl.n}")


def _groupoid(res, gamma, lg):
    l = gamma.host
    rep = res.add(Report(f"groupoid laws for {gamma.name}"))
    sigma = inverse_cocycle(gamma, strict=False)
    rep.add("Γ⁻¹∘Γ = ε̂ on L", compose_cocycles(gamma, sigma, strict=False).table == trivial_cocycle(l).table)
    rep.add("Γ∘Γ⁻¹ = ε̂ on L^Γ", compose_cocycles(sigma, gamma, strict=False).table == trivial_cocycle(lg).table)
    rep.add("(Γ⁻¹)⁻¹ = Γ", inverse_cocycle(sigma, strict=False).table == gamma.table)
    rep.add("(L^Γ)^{Γ⁻¹} = L", cotwist(sigma, strict=False).structure_equal(l))
    res.add(sharp_product_report(gamma, sigma))


def _cocycle_code(rep):
    name = rep.failures[0].name
    return {"counit condition": "CounitConditionFailed", "left B̄-linear": "NotLinear",
            "balanced": "NotBalanced"}.get(name, "CocycleConditionFailed")


def cmd_cotwist(args, res):
    host = load_structure(args.algebra, args.field, strict=True)
    gamma, ctx = load_cocycle(args.cocycle, host)
    res.dimensions["base dim"] = host.d
    res.dimensions["total dim"] = host.n
    res.add(gamma.report)
    if not gamma.report.ok:
        res.stop(_cocycle_code(gamma.report), gamma.report)
        return
    check_invertible(gamma)
    res.add(gamma.invertibility)
    if not gamma.invertibility.ok:
        res.stop("NotInvertibleCocycle", gamma.invertibility)
        return
    lg = cotwist(gamma, strict=False)
    res.add(lg.report)
    if not lg.report.ok:
        res.stop("AxiomFailure", lg.report)
        return
    res.add(verify_translation_identities(lg))
    res.add(square_report(gamma, lg))
    if args.cocycle and load_json(resolve(args.cocycle)).get("kind") == "trivial":
        rep = res.add(Report("trivial cocycle"))
        rep.add("L^ε̂ structurally equals L", lg.structure_equal(host))
    checks = args.checks
    if checks in ("all", "groupoid"):
        _groupoid(res, gamma, lg)
    if checks == "all":
        fam = default_family(host)
        rep = res.add(Report("monoidal structure"))
        skipped = []
        for M in fam:
            for N in fam:
                if M.dim * N.dim > MONOIDAL_LIMIT:
                    skipped.append(f"({M.name}, {N.name})")
                    continue
                rep.extend(monoidal_report(gamma, M, N), prefix=f"({M.name}, {N.name}) ")
        for M in fam:
            for N in fam:
                for P in fam:
                    if M.dim * N.dim * P.dim > COHERENCE_LIMIT:
                        skipped.append(f"({M.name}, {N.name}, {P.name})")
                        continue
                    rep.extend(coherence_report(gamma, M, N, P), prefix=f"({M.name}, {N.name}, {P.name}) ")
        if skipped:
            res.lines.append(f"skipped (tensor dimension above limit): {', '.join(skipped)}")
    if checks in ("all", "hopf-compare") and host.d == 1:
        rep = res.add(hopf_case_compare(gamma))
        res.lines.append("ψ = " + ", ".join(f"{host.total.names[i]} ↦ {_fmt(host.total, rep.psi[i])}"
                                            for i in range(host.n)))
    elif checks == "hopf-compare":
        rep = res.add(Report("Hopf-case comparison"))
        rep.add("base is the ground field", False, [host.d])


def cmd_quantize(args, res):
    alg = load_algebra(args.file, args.field)
    theta = Fraction(args.theta)
    if len(alg.derivations) != 2:
        raise ConformanceFailure("no nilpotent derivation recipe applies",
                                 witness=[f"{len(alg.derivations)} derivations supplied"])
    q = quantized_jet(alg, alg.derivations, theta, strict=False)
    res.dimensions["dim J"] = q.jet.n
    res.dimensions["dim D"] = q.diff.n
    res.add(q.F.report)
    res.add(q.cotwisted.report)
    res.add(q.report)
    lf = twist_bialgebroid_by_F(q.F, strict=False)
    res.add(lf.report)
    tp = twisted_pairing(q.F, q.pairing, lam_f=lf, l_gamma=q.cotwisted)
    from .duality import pairing_report
    res.add(pairing_report(tp))
    res.add(twisted_pairing_closed_form(tp, q))
    if theta == 0:
        rep = res.add(Report("θ = 0"))
        rep.add("J^Γ structurally equals J", q.cotwisted.structure_equal(q.jet))
    BG = q.cotwisted.base
    gens = [alg.names.index(nm) for nm in ("x", "y") if nm in alg.names]
    if len(gens) < 2:
        gens = [i for i in range(alg.dim) if i not in alg.unit][:2]
    if len(gens) == 2:
        x, y = ({gens[0]: alg.field.one}, {gens[1]: alg.field.one})
        nx, ny = alg.names[gens[0]], alg.names[gens[1]]
        res.lines.append(f"{nx}·_Γ{ny} − {ny}·_Γ{nx} = {_fmt(BG, commutator(BG, x, y))}")


COMMANDS = {"verify": cmd_verify, "jet": cmd_jet, "cotwist": cmd_cotwist, "quantize": cmd_quantize}


def build_parser():
    ap = argparse.ArgumentParser(prog="hopfjet", description="Exact checks for Hopf algebroids and jets.")
    ap.add_argument("--field", default=None, help="override the ground field: Q or Fp:<p>")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", action="store_true", help="print the machine-readable report")
        p.add_argument("--field", default=argparse.SUPPRESS, help="override the ground field: Q or Fp:<p>")

    p = sub.add_parser("verify", help="bialgebroid axioms and translation identities")
    p.add_argument("file")
    p.add_argument("--pair", action="store_true", help="use the pair Hopf algebroid of the algebra")
    common(p)
    p = sub.add_parser("jet", help="μ_k / J^k / Ω¹_k dimension table")
    p.add_argument("file")
    p.add_argument("--max-k", type=int, default=STABILIZATION_CAP)
    common(p)
    p = sub.add_parser("cotwist", help="twist a Hopf algebroid by a 2-cocycle")
    p.add_argument("algebra")
    p.add_argument("cocycle")
    p.add_argument("--checks", choices=["all", "groupoid", "hopf-compare"], default="all")
    common(p)
    p = sub.add_parser("quantize", help="Moyal-type quantization of the jet algebroid")
    p.add_argument("file")
    p.add_argument("--theta", default="1")
    common(p)
    return ap


def run(argv=None):
    """Parse arguments, run a command, return the Result."""
    args = build_parser().parse_args(argv)
    files = [getattr(args, k) for k in ("file", "algebra", "cocycle") if getattr(args, k, None)]
    res = Result(args.command, files)
    t0 = time.perf_counter()
    try:
        args.field = Field.parse(args.field) if args.field else None
        if args.command == "quantize":
            Fraction(args.theta)
        COMMANDS[args.command](args, res)
    except (InputError, ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, AlgebraError):
            _algebra_error(res, exc, args)
        else:
            res.error = {"code": "InputError", "message": str(exc), "witness": None}
    finally:
        res.timing = time.perf_counter() - t0
    return res, args


def _algebra_error(res, exc, args):
    from .algcore import BadUnit, NotAssociative
    if isinstance(exc, (BadUnit, NotAssociative)):
        res.error = {"code": exc.code, "message": str(exc), "witness": _jsonable(exc.witness)}
    else:
        res.fail(exc)


def main(argv=None):
    try:
        res, args = run(argv)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_INPUT if exc.code not in (0, None) else 0
    print(res.to_json() if getattr(args, "json", False) else res.to_text())
    return res.exit_code()


if __name__ == "__main__":
    sys.exit(main())
