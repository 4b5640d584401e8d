"""Left 2-cocycles, the cotwisted Hopf algebroid L^Γ and the cocycle groupoid.

A cocycle is stored as ``table[X][Y]``: the vector Γ(e_X, e_Y) in B.
Comodules carry a B-bimodule structure (``left``/``right`` ops) and a
coaction given by ambient representatives in L⊗M (index X*dim + m).
"""
from __future__ import annotations

from functools import cached_property

from .algcore import (
    AlgebraError, Bimodule, FiniteAlgebra, Relation, Report, BalancedSpace, op_apply,
    tensor_vec,
)
from .algebroid import AxiomFailure, lambda_map, make_bialgebroid, antipode
from .exactla import sp_add, sp_clean


class NotBalanced(AlgebraError):
    code = "NotBalanced"


class NotLinear(AlgebraError):
    code = "NotLinear"


class CocycleConditionFailed(AlgebraError):
    code = "CocycleConditionFailed"


class CounitConditionFailed(AlgebraError):
    code = "CounitConditionFailed"


class NotInvertibleCocycle(AlgebraError):
    code = "NotInvertibleCocycle"


class HostMismatch(AlgebraError):
    code = "HostMismatch"


class NotConvolutionInvertible(AlgebraError):
    code = "NotConvolutionInvertible"


class DimensionMismatch(AlgebraError):
    code = "DimensionMismatch"


def act(ops, bvec, mvec):
    """Σ β_b op_b(m)."""
    out = {}
    for b, c in bvec.items():
        sp_add(out, op_apply(ops[b], mvec), c)
    return out


# -------------------------------------------------------------- comodules

class Comodule:
    """Left comodule: B-bimodule M with δ(a·m·b) = s(a)m₋₁s(b) ⊗ m₀."""

    def __init__(self, host, dim, left, right, coaction, name=""):
        self.host = host
        self.dim = dim
        self.left = left
        self.right = right
        self.coaction = [sp_clean(v) for v in coaction]
        self.name = name

    def terms(self, m):
        """δ(e_m) as (X, m0, c) triples."""
        dm = self.dim
        return [(k // dm, k % dm, c) for k, c in self.coaction[m].items()]

    def coact(self, vec):
        out = {}
        for m, c in vec.items():
            sp_add(out, self.coaction[m], c)
        return out

    @cached_property
    def diamond(self):
        """L ⋄ M : t(b)X⊗m ≡ X⊗b·m."""
        l = self.host
        rel = Relation(1, l.base, self.left, [{0: op} for op in l.t_left], "⋄")
        return BalancedSpace(l.field, (l.n, self.dim), [rel], trusted=l.maps_ok, name=f"L⋄{self.name}")

    @cached_property
    def diamond2(self):
        l = self.host
        r2 = Relation(2, l.base, self.left, [{1: op} for op in l.t_left])
        r1 = Relation(1, l.base, l.s_left, [{0: op} for op in l.t_left])
        return BalancedSpace(l.field, (l.n, l.n, self.dim), [r2, r1], trusted=l.maps_ok,
                             name=f"L⋄L⋄{self.name}")

    def __repr__(self):
        return f"Comodule({self.name}, dim={self.dim})"


def base_comodule(l):
    """B with δ(b) = s(b) ⋄ 1."""
    B = l.base
    d = B.dim
    left = [B.left_basis_op(a) for a in range(d)]
    right = [B.right_basis_op(a) for a in range(d)]
    coact = [tensor_vec([l.source[b], B.unit], (l.n, d)) for b in range(d)]
    return Comodule(l, d, left, right, coact, name="B")


def coproduct_comodule(l):
    """L with δ = Δ; a·X·b = s(a)Xs(b)."""
    return Comodule(l, l.n, l.s_left, l.s_right, l.coproduct, name="L_Δ")


def regular_comodule(l):
    """L with δ(X) = X₋ ⊗ X₊; a·X·b = t(b)Xt(a)."""
    reps = l.tm.swapped().reps
    return Comodule(l, l.n, l.t_right, l.t_left, reps, name="L_reg")


def default_family(l):
    if not hasattr(l, "_default_family"):
        l._default_family = [base_comodule(l), coproduct_comodule(l), regular_comodule(l)]
    return l._default_family


def verify_comodule(M):
    l = M.host
    L = l.total
    fld = l.field
    d, dm = l.d, M.dim
    rep = Report(f"comodule {M.name}")
    fails = Bimodule(dm, l.base, M.left, l.base, M.right).verify()
    rep.add("B-bimodule", not fails, fails[0] if fails else None)
    if fails:
        return rep
    dia = M.diamond

    def mul_first(vec, left=None, right=None):
        out = {}
        for k, c in vec.items():
            X, m = divmod(k, dm)
            x = {X: fld.one}
            if left is not None:
                x = L.mul(left, x)
            if right is not None:
                x = L.mul(x, right)
            sp_add(out, tensor_vec([x, {m: fld.one}], (l.n, dm)), c)
        return out

    def act_second(vec, ops):
        out = {}
        for k, c in vec.items():
            X, m = divmod(k, dm)
            sp_add(out, tensor_vec([{X: fld.one}, op_apply(ops, {m: fld.one})], (l.n, dm)), c)
        return out

    wl = wr = wt = None
    for m in range(dm):
        dmv = M.coaction[m]
        for a in range(d):
            lhs = dia.project(M.coact(op_apply(M.left[a], {m: fld.one})))
            if lhs != dia.project(mul_first(dmv, left=l.source[a])):
                wl = wl or (a, m)
            lhs = dia.project(M.coact(op_apply(M.right[a], {m: fld.one})))
            if lhs != dia.project(mul_first(dmv, right=l.source[a])):
                wr = wr or (a, m)
            if dia.project(mul_first(dmv, right=l.target[a])) != dia.project(act_second(dmv, M.right[a])):
                wt = wt or (a, m)
    rep.add("coaction left B-linear", wl is None, wl)
    rep.add("coaction right B-linear", wr is None, wr)
    rep.add("coaction lands in Takeuchi product", wt is None, wt)
    d3 = M.diamond2
    w = None
    for m in range(dm):
        lhs, rhs = {}, {}
        for X, m0, c in M.terms(m):
            sp_add(lhs, tensor_vec([l.coproduct[X], {m0: fld.one}], (l.n * l.n, dm)), c)
            sp_add(rhs, tensor_vec([{X: fld.one}, M.coaction[m0]], (l.n, l.n * dm)), c)
        if d3.project(lhs) != d3.project(rhs):
            w = (m,)
            break
    rep.add("coassociative", w is None, w)
    w = None
    for m in range(dm):
        acc = {}
        for X, m0, c in M.terms(m):
            sp_add(acc, act(M.left, l.counit[X], {m0: fld.one}), c)
        if acc != {m: fld.one}:
            w = (m,)
            break
    rep.add("counital", w is None, w)
    return rep


def tensor_comodule(M, N, space=None):
    """M ⊗_B N with the codiagonal coaction m₋₁n₋₁ ⋄ m₀⊗n₀."""
    l = M.host
    if N.host is not l:
        raise HostMismatch("comodules over different hosts")
    sp = space or tensor_space(M, N)
    dm, dn = M.dim, N.dim
    fld = l.field
    q = sp.dim
    left, right = [], []
    secs = [sp.section(j) for j in range(q)]
    for a in range(l.d):
        lo, ro = [], []
        for s in secs:
            lv, rv = {}, {}
            for k, c in s.items():
                i, j = divmod(k, dn)
                sp_add(lv, tensor_vec([op_apply(M.left[a], {i: fld.one}), {j: fld.one}], (dm, dn)), c)
                sp_add(rv, tensor_vec([{i: fld.one}, op_apply(N.right[a], {j: fld.one})], (dm, dn)), c)
            lo.append(sp.project(lv))
            ro.append(sp.project(rv))
        left.append(lo)
        right.append(ro)
    coact = [codiagonal(M, N, s, sp) for s in secs]
    T = Comodule(l, q, left, right, coact, name=f"{M.name}⊗{N.name}")
    T.space = sp
    return T


def codiagonal(M, N, vec, sp):
    """Coaction of an ambient m⊗n, second factor projected to ``sp``."""
    l = M.host
    L = l.total
    dn = N.dim
    q = sp.dim
    out = {}
    for k, c in vec.items():
        i, j = divmod(k, dn)
        for X, m0, c1 in M.terms(i):
            for Y, n0, c2 in N.terms(j):
                prod = L.table[X][Y]
                if not prod:
                    continue
                img = sp.basis_image(m0 * dn + n0)
                if img:
                    sp_add(out, tensor_vec([prod, img], (l.n, q)), c * c1 * c2)
    return out


def tensor_space(M, N):
    """M ⊗_B N : m·b ⊗ n ≡ m ⊗ b·n."""
    l = M.host
    cache = l.__dict__.setdefault("_tensor_spaces", {})
    key = (id(M), id(N))
    if key not in cache:
        rel = Relation(1, l.base, N.left, [{0: op} for op in M.right], "⊗B")
        cache[key] = (M, N, BalancedSpace(l.field, (M.dim, N.dim), [rel], trusted=l.maps_ok,
                                          name=f"{M.name}⊗B{N.name}"))
    return cache[key][2]


# --------------------------------------------------------------- cocycles

class Cocycle:
    """B-valued bilinear form on L given on basis pairs."""

    def __init__(self, host, table, name=""):
        self.host = host
        self.table = [[sp_clean(v) for v in row] for row in table]
        self.name = name
        self.report = None
        self.invertibility = None
        self._sharp = {}

    def __call__(self, x, y):
        out = {}
        for i, a in x.items():
            row = self.table[i]
            for j, b in y.items():
                v = row[j]
                if v:
                    sp_add(out, v, a * b)
        return out

    def basis(self, i, j):
        return self.table[i][j]

    def equal(self, other):
        return self.table == other.table

    def __repr__(self):
        return f"Cocycle({self.name} on {self.host.name})"


def trivial_cocycle(l):
    """ε̂(X, Y) = ε(XY)."""
    L = l.total
    return Cocycle(l, [[l.eps(L.table[X][Y]) for Y in range(l.n)] for X in range(l.n)], name="trivial")


def _pair_products(gamma):
    """P(X, Y) = s(Γ(X₁, Y₁)) X₂ Y₂ for all basis pairs (ambient vectors in L)."""
    l = gamma.host
    L = l.total
    n = l.n
    splits = [l.split2(l.coproduct[X]) for X in range(n)]
    out = []
    for X in range(n):
        row = []
        for Y in range(n):
            acc = {}
            for x1, x2, c1 in splits[X]:
                for y1, y2, c2 in splits[Y]:
                    g = gamma.table[x1][y1]
                    if not g:
                        continue
                    prod = L.table[x2][y2]
                    if not prod:
                        continue
                    sp_add(acc, L.mul(l.s(g), prod), c1 * c2)
            row.append(acc)
        out.append(row)
    return out


def cocycle_report(gamma, stop_early=True):
    l = gamma.host
    L = l.total
    n, d = l.n, l.d
    fld = l.field
    B = l.base
    rep = Report(f"cocycle {gamma.name} on {l.name}")
    one = L.unit
    w = None
    for X in range(n):
        e = {X: fld.one}
        if gamma(one, e) != l.counit[X] or gamma(e, one) != l.counit[X]:
            w = (X,)
            break
    rep.add("counit condition", w is None, w)
    w = None
    for b in range(d):
        tb = l.target[b]
        for X in range(n):
            tbX = L.mul(tb, {X: fld.one})
            for Y in range(n):
                if gamma(tbX, {Y: fld.one}) != B.mul(gamma.table[X][Y], {b: fld.one}):
                    w = (b, X, Y)
                    break
            if w:
                break
        if w:
            break
    rep.add("left B̄-linear", w is None, w)
    w = None
    for b in range(d):
        tb = l.target[b]
        for X in range(n):
            Xtb = L.mul({X: fld.one}, tb)
            for Y in range(n):
                if gamma(Xtb, {Y: fld.one}) != gamma({X: fld.one}, L.mul(tb, {Y: fld.one})):
                    w = (b, X, Y)
                    break
            if w:
                break
        if w:
            break
    rep.add("balanced", w is None, w)
    if stop_early and not rep.ok:
        return rep
    rep.add(*_cocycle_condition(gamma))
    return rep


def _cocycle_condition(gamma):
    """Γ(X, P(Y,Z)) = Γ(P(X,Y), Z) for all basis triples, by matrix products.

    With Pm the n × n² matrix whose column Y*n+Z is P(Y,Z), and G_c[X, W] the
    c-th coordinate of Γ(X, W): G_c·Pm has entry [X, Y*n+Z] and Pmᵀ·G_c entry
    [X*n+Y, Z]; both flatten to the same row-major order.
    """
    l = gamma.host
    n, d = l.n, l.d
    fld = l.field
    P = _pair_products(gamma)
    cols = [P[Y][Z] for Y in range(n) for Z in range(n)]
    pm = fld.from_sparse_cols(n, cols)
    pt = pm.transpose()
    for c in range(d):
        g = fld.matrix(n, n)
        for X in range(n):
            for W in range(n):
                v = gamma.table[X][W].get(c)
                if v:
                    g[X, W] = v
        lhs = g * pm
        rhs = pt * g
        if lhs.entries() != rhs.entries():
            le, re_ = lhs.entries(), rhs.entries()
            for k, (u, v) in enumerate(zip(le, re_)):
                if u != v:
                    X, rest = divmod(k, n * n)
                    Y, Z = divmod(rest, n)
                    return "cocycle condition", False, (X, Y, Z, c)
    return "cocycle condition", True, None


_ERRORS = {
    "counit condition": CounitConditionFailed,
    "left B̄-linear": NotLinear,
    "balanced": NotBalanced,
    "cocycle condition": CocycleConditionFailed,
}


def check_cocycle(l, table, name="", strict=True):
    """Certify a basis-pair table as a left 2-cocycle on l."""
    gamma = table if isinstance(table, Cocycle) else Cocycle(l, table, name=name)
    rep = cocycle_report(gamma)
    gamma.report = rep
    if strict and not rep.ok:
        bad = rep.failures[0]
        raise _ERRORS[bad.name](f"{gamma.name or 'cocycle'}: {bad.name} fails", bad.witness)
    return gamma


# ------------------------------------------------------------ twisted base

def twisted_base(gamma):
    """B^Γ with a·b = Γ(s(a), s(b))."""
    if not hasattr(gamma, "_base"):
        l = gamma.host
        B = l.base
        table = [[gamma(l.source[a], l.source[b]) for b in range(B.dim)] for a in range(B.dim)]
        alg = FiniteAlgebra(l.field, table, dict(B.unit), names=B.names, name=f"{B.name}^Γ")
        alg.verify()
        gamma._base = alg
    return gamma._base


def twisted_actions(gamma, M):
    """b·m = Γ(b, m₋₁)m₀ and m·b = Γ(m₋₁, b)m₀ as ops on M."""
    key = ("acts", id(M))
    if key in gamma._sharp:
        return gamma._sharp[key][1]
    l = gamma.host
    fld = l.field
    left, right = [], []
    for b in range(l.d):
        sb = l.source[b]
        lo, ro = [], []
        for m in range(M.dim):
            lv, rv = {}, {}
            for X, m0, c in M.terms(m):
                e0 = {m0: fld.one}
                sp_add(lv, act(M.left, gamma(sb, {X: fld.one}), e0), c)
                sp_add(rv, act(M.left, gamma({X: fld.one}, sb), e0), c)
            lo.append(lv)
            ro.append(rv)
        left.append(lo)
        right.append(ro)
    gamma._sharp[key] = (M, (left, right))
    return left, right


class GammaSharp:
    """Γ^# : M ⊗_{B^Γ} N → M ⊗_B N as a matrix between presented quotients."""

    def __init__(self, gamma, M, N, domain, codomain, matrix):
        self.gamma = gamma
        self.M, self.N = M, N
        self.domain = domain
        self.codomain = codomain
        self.matrix = matrix
        self._inv = None

    @cached_property
    def rank(self):
        return self.matrix.rank() if self.domain.dim else 0

    @property
    def bijective(self):
        return self.domain.dim == self.codomain.dim and self.rank == self.domain.dim

    @property
    def inverse(self):
        if self._inv is None:
            if not self.bijective:
                raise NotInvertibleCocycle(f"Γ^# on ({self.M.name}, {self.N.name}) is not bijective",
                                           witness=[self.M.name, self.N.name])
            self._inv = self.matrix.inv()
        return self._inv

    def apply(self, coords):
        return _mat_vec(self.matrix, coords)

    def apply_inverse(self, coords):
        return _mat_vec(self.inverse, coords)


def _mat_vec(m, coords):
    out = {}
    for j, c in coords.items():
        for i in range(m.nrows()):
            v = m[i, j]
            if v != 0:
                w = out.get(i)
                out[i] = v * c if w is None else w + v * c
    return sp_clean(out)


def sharp_ambient(gamma, M, N, vec):
    """Γ(m₋₁, n₋₁) m₀ ⊗ n₀ on an ambient vector of M⊗N (result ambient)."""
    fld = gamma.host.field
    dm, dn = M.dim, N.dim
    out = {}
    for k, c in vec.items():
        i, j = divmod(k, dn)
        for X, m0, c1 in M.terms(i):
            for Y, n0, c2 in N.terms(j):
                g = gamma.table[X][Y]
                if g:
                    mv = act(M.left, g, {m0: fld.one})
                    if mv:
                        sp_add(out, tensor_vec([mv, {n0: fld.one}], (dm, dn)), c * c1 * c2)
    return out


def twisted_tensor_space(gamma, M, N):
    l = gamma.host
    BG = twisted_base(gamma)
    lm, _ = twisted_actions(gamma, N)
    _, rm = twisted_actions(gamma, M)
    rel = Relation(1, BG, lm, [{0: op} for op in rm], "⊗BΓ")
    return BalancedSpace(l.field, (M.dim, N.dim), [rel], trusted=False, name=f"{M.name}⊗BΓ{N.name}")


def gamma_sharp(gamma, M, N):
    key = (id(M), id(N))
    hit = gamma._sharp.get(key)
    if hit is not None:
        return hit[2]
    l = gamma.host
    if M.host is not l or N.host is not l:
        raise DimensionMismatch("comodules are not over the cocycle's host")
    dom = twisted_tensor_space(gamma, M, N)
    cod = tensor_space(M, N)
    if dom.dim != cod.dim:
        raise DimensionMismatch(f"M⊗_BΓ N has dim {dom.dim} but M⊗_B N has dim {cod.dim}",
                                witness=[dom.dim, cod.dim])
    cols = [cod.project(sharp_ambient(gamma, M, N, dom.section(j))) for j in range(dom.dim)]
    mat = l.field.from_sparse_cols(cod.dim, cols)
    gs = GammaSharp(gamma, M, N, dom, cod, mat)
    gamma._sharp[key] = (M, N, gs)
    return gs


def check_invertible(gamma, family=None):
    """Γ^# bijective for every ordered pair from the family (default: B, L_Δ, L_reg)."""
    fam = family or default_family(gamma.host)
    rep = Report(f"invertible on tested family ({', '.join(M.name for M in fam)})")
    ok = True
    for M in fam:
        for N in fam:
            try:
                gs = gamma_sharp(gamma, M, N)
                good = gs.bijective
                rep.add(f"Γ^# on ({M.name}, {N.name}) bijective", good,
                        None if good else [M.name, N.name, gs.rank, gs.domain.dim])
            except DimensionMismatch as exc:
                good = False
                rep.add(f"Γ^# on ({M.name}, {N.name}) bijective", False, [M.name, N.name] + exc.witness)
            ok = ok and good
    gamma.invertibility = rep
    return ok


# ---------------------------------------------------------------- cotwist

def twisted_product(gamma, X, Y):
    """X·_ΓY = s(Γ(X₁,Y₁)) X₂₊Y₂₊ t(Γ(Y₂₋, X₂₋)) on basis indices."""
    l = gamma.host
    L = l.total
    tms = _tm_splits(l)
    out = {}
    for x1, x2, c1 in l.split2(l.coproduct[X]):
        for y1, y2, c2 in l.split2(l.coproduct[Y]):
            g = gamma.table[x1][y1]
            if not g:
                continue
            sg = l.s(g)
            for p, q, c3 in tms[x2]:
                for pp, qq, c4 in tms[y2]:
                    h = gamma.table[qq][q]
                    if not h:
                        continue
                    mid = L.table[p][pp]
                    if not mid:
                        continue
                    v = L.mul(L.mul(sg, mid), l.t(h))
                    sp_add(out, v, c1 * c2 * c3 * c4)
    return out


def _tm_splits(l):
    if not hasattr(l, "_tm_splits"):
        l._tm_splits = [l.split2(r) for r in l.tm.reps]
    return l._tm_splits


def cotwist(gamma, strict=True, check_family=True):
    """L^Γ over B^Γ; the result is re-verified as a bialgebroid and left Hopf."""
    if hasattr(gamma, "_cotwist"):
        return gamma._cotwist
    l = gamma.host
    n = l.n
    if check_family and not check_invertible(gamma):
        bad = gamma.invertibility.failures[0]
        raise NotInvertibleCocycle(f"{bad.name} fails", bad.witness)
    BG = twisted_base(gamma)
    table = [[twisted_product(gamma, X, Y) for Y in range(n)] for X in range(n)]
    total = FiniteAlgebra(l.field, table, dict(l.total.unit), names=l.total.names,
                          name=f"{l.total.name}^Γ")
    default_family(l)
    reg, cop = l._default_family[2], l._default_family[1]
    gs = gamma_sharp(gamma, reg, cop)
    coprod = []
    for X in range(n):
        coords = gs.apply_inverse(gs.codomain.project(l.coproduct[X]))
        coprod.append(gs.domain.lift(coords))
    counit = []
    for X in range(n):
        acc = {}
        for p, q, c in _tm_splits(l)[X]:
            sp_add(acc, gamma.table[p][q], c)
        counit.append(acc)
    lg = make_bialgebroid(total, BG, l.source, l.target, coprod, counit, name=f"{l.name}^Γ", strict=strict)
    lg.cocycle = gamma
    lg.tm  # left Hopf: raises NotLeftHopf otherwise
    gamma._cotwist = lg
    return lg


def square_report(gamma, lg=None):
    """Γ^#∘λ^Γ = λ∘Γ^# with Γ^#(X⊗Y) = X₊ ⊗ Y₊ t(Γ(Y₋, X₋)) on L^Γ⊗_{B̄^Γ}L^Γ."""
    l = gamma.host
    lg = lg or cotwist(gamma)
    L = l.total
    tms = _tm_splits(l)
    rep = Report(f"translation square {lg.name}")
    default_family(l)
    reg, cop = l._default_family[2], l._default_family[1]

    def sharp_bar(vec):
        out = {}
        for X, Y, c in l.split2(vec):
            for p, q, c1 in tms[X]:
                for pp, qq, c2 in tms[Y]:
                    g = gamma.table[qq][q]
                    if g:
                        sp_add(out, l.t2({p: l.field.one}, L.mul({pp: l.field.one}, l.t(g))), c * c1 * c2)
        return out

    w = None
    for j in range(lg.bar.dim):
        u = lg.bar.section(j)
        lhs = l.diamond.project(lambda_map(l, sharp_bar(u)))
        rhs = l.diamond.project(sharp_ambient(gamma, reg, cop, lambda_map(lg, u)))
        if lhs != rhs:
            w = (j,)
            break
    rep.add("Γ^# intertwines λ^Γ and λ", w is None, w)
    return rep


def comodule_transport(gamma, M, lg=None, check=True):
    """Γ(M): same space, twisted actions, coaction Γ^#⁻¹∘δ."""
    l = gamma.host
    lg = lg or cotwist(gamma)
    default_family(l)
    reg = l._default_family[2]
    left, right = twisted_actions(gamma, M)
    gs = gamma_sharp(gamma, reg, M)
    coact = []
    for m in range(M.dim):
        coords = gs.apply_inverse(gs.codomain.project(M.coaction[m]))
        coact.append(gs.domain.lift(coords))
    T = Comodule(lg, M.dim, left, right, coact, name=f"Γ({M.name})")
    if check:
        T.report = verify_comodule(T)
        if not T.report.ok:
            bad = T.report.failures[0]
            raise AxiomFailure(f"{T.name}: {bad.name} fails", bad.witness, report=T.report)
    return T


def monoidal_report(gamma, M, N, TM=None, TN=None):
    """Γ^#_{M,N} : Γ(M)⊗_{B^Γ}Γ(N) → Γ(M⊗_B N) is L^Γ-colinear."""
    lg = cotwist(gamma)
    TM = TM or comodule_transport(gamma, M)
    TN = TN or comodule_transport(gamma, N)
    gs = gamma_sharp(gamma, M, N)
    dom = tensor_comodule(TM, TN, space=gs.domain)
    MN = tensor_comodule(M, N, space=gs.codomain)
    TMN = comodule_transport(gamma, MN)
    q = MN.dim
    rep = Report(f"monoidal {M.name},{N.name}")
    w = None
    fld = gamma.host.field
    for j in range(dom.dim):
        lhs = {}
        for X, u, c in dom.terms(j):
            img = gs.apply({u: fld.one})
            if img:
                sp_add(lhs, tensor_vec([{X: fld.one}, img], (lg.n, q)), c)
        rhs = TMN.coact(gs.apply({j: fld.one}))
        if TMN.diamond.project(lhs) != TMN.diamond.project(rhs):
            w = (j,)
            break
    rep.add("Γ^# is L^Γ-colinear", w is None, w)
    return rep


def coherence_report(gamma, N, M, P):
    """Γ^#_{N⊗M,P}∘(Γ^#_{N,M}⊗id) = Γ^#_{N,M⊗P}∘(id⊗Γ^#_{M,P}) on (N⊗M⊗P) over B^Γ."""
    l = gamma.host
    fld = l.field
    dn, dm, dp = N.dim, M.dim, P.dim
    NM = _ambient_pair(N, M)
    MP = _ambient_pair(M, P)
    rel_hi = Relation(2, l.base, P.left, [{1: op} for op in M.right])
    rel_lo = Relation(1, l.base, M.left, [{0: op} for op in N.right])
    cod = BalancedSpace(fld, (dn, dm, dp), [rel_hi, rel_lo], trusted=l.maps_ok, name="N⊗M⊗P")
    BG = twisted_base(gamma)
    _, rN = twisted_actions(gamma, N)
    lM, rM = twisted_actions(gamma, M)
    lP, _ = twisted_actions(gamma, P)
    dom = BalancedSpace(fld, (dn, dm, dp),
                        [Relation(2, BG, lP, [{1: op} for op in rM]),
                         Relation(1, BG, lM, [{0: op} for op in rN])], name="N⊗M⊗P over BΓ")
    rep = Report("coherence")
    w = None
    for j in range(dom.dim):
        u = dom.section(j)
        # left: apply Γ^#_{N,M} on the first two factors, then Γ^#_{NM,P}
        step = {}
        for k, c in u.items():
            nm, p = divmod(k, dp)
            img = sharp_ambient(gamma, N, M, {nm: fld.one})
            for k2, c2 in img.items():
                sp_add(step, {k2 * dp + p: c2}, c)
        lhs = sharp_ambient(gamma, NM, P, step)
        step = {}
        for k, c in u.items():
            nn, mp = divmod(k, dm * dp)
            img = sharp_ambient(gamma, M, P, {mp: fld.one})
            for k2, c2 in img.items():
                sp_add(step, {nn * dm * dp + k2: c2}, c)
        rhs = sharp_ambient(gamma, N, MP, step)
        if cod.project(lhs) != cod.project(rhs):
            w = (j,)
            break
    rep.add("coherence", w is None, w)
    return rep


class _AmbientPair:
    """M⊗N without the balancing quotient; enough for evaluating Γ^# formulas."""

    def __init__(self, M, N):
        l = M.host
        self.host = l
        self.M, self.N = M, N
        self.dim = M.dim * N.dim
        self.name = f"{M.name}⊗{N.name}"
        fld = l.field
        self.left = []
        for a in range(l.d):
            op = []
            for k in range(self.dim):
                i, j = divmod(k, N.dim)
                op.append(tensor_vec([op_apply(M.left[a], {i: fld.one}), {j: fld.one}], (M.dim, N.dim)))
            self.left.append(op)
        self._terms = {}

    def terms(self, k):
        if k not in self._terms:
            l = self.host
            L = l.total
            dn = self.N.dim
            i, j = divmod(k, dn)
            acc = {}
            for X, m0, c1 in self.M.terms(i):
                for Y, n0, c2 in self.N.terms(j):
                    for Z, c in L.table[X][Y].items():
                        sp_add(acc, {Z * self.dim + m0 * dn + n0: c * c1 * c2})
            self._terms[k] = [(key // self.dim, key % self.dim, c) for key, c in acc.items()]
        return self._terms[k]


def _ambient_pair(M, N):
    return _AmbientPair(M, N)


# ------------------------------------------------------- inverse, composition

def inverse_cocycle(gamma, strict=True):
    """Σ(X,Y) = Γ(X₊Y₊, s(Γ(Y₋₁, X₋₁)) Y₋₂X₋₂), a cocycle on L^Γ."""
    l = gamma.host
    lg = cotwist(gamma)
    L = l.total
    n = l.n
    tms = _tm_splits(l)
    cops = [l.split2(l.coproduct[X]) for X in range(n)]
    table = []
    for X in range(n):
        row = []
        for Y in range(n):
            acc = {}
            for p, q, c1 in tms[X]:
                for pp, qq, c2 in tms[Y]:
                    left = L.table[p][pp]
                    if not left:
                        continue
                    right = {}
                    for a, b, c3 in cops[qq]:
                        for a2, b2, c4 in cops[q]:
                            g = gamma.table[a][a2]
                            if not g:
                                continue
                            prod = L.table[b][b2]
                            if prod:
                                sp_add(right, L.mul(l.s(g), prod), c3 * c4)
                    if right:
                        sp_add(acc, gamma(left, right), c1 * c2)
            row.append(acc)
        table.append(row)
    sigma = Cocycle(lg, table, name=f"{gamma.name}⁻¹")
    return check_cocycle(lg, sigma, strict=strict)


def compose_cocycles(gamma, sigma, strict=True):
    """(Σ∘Γ)(X,Y) = Γ(Σ(X^⟨1⟩,Y^⟨1⟩)·_Γ X^⟨2⟩, Y^⟨2⟩), a cocycle on L."""
    l = gamma.host
    lg = cotwist(gamma)
    if sigma.host is not lg and not sigma.host.structure_equal(lg):
        raise HostMismatch(f"{sigma.name} lives on {sigma.host.name}, not on the cotwist by {gamma.name}")
    LG = lg.total
    n = l.n
    cops = [lg.split2(lg.coproduct[X]) for X in range(n)]
    table = []
    for X in range(n):
        row = []
        for Y in range(n):
            acc = {}
            for x1, x2, c1 in cops[X]:
                for y1, y2, c2 in cops[Y]:
                    s = sigma.table[x1][y1]
                    if not s:
                        continue
                    left = LG.mul(lg.s(s), {x2: l.field.one})
                    if left:
                        sp_add(acc, gamma(left, {y2: l.field.one}), c1 * c2)
            row.append(acc)
        table.append(row)
    comp = Cocycle(l, table, name=f"{sigma.name}∘{gamma.name}")
    return check_cocycle(l, comp, strict=strict)


def sharp_product_report(gamma, sigma, comp=None, family=None):
    """(Σ∘Γ)^# = Γ^#∘Σ^# on the default family (Σ^# on transported comodules)."""
    l = gamma.host
    comp = comp or compose_cocycles(gamma, sigma)
    fam = family or default_family(l)
    trans = [comodule_transport(gamma, M) for M in fam]
    rep = Report("composite Γ^#")
    for M, TM in zip(fam, trans):
        for N, TN in zip(fam, trans):
            a = gamma_sharp(comp, M, N)
            g = gamma_sharp(gamma, M, N)
            s = gamma_sharp(sigma, TM, TN)
            same_dom = a.domain.dim == s.domain.dim
            ok = same_dom and a.matrix == g.matrix * s.matrix
            rep.add(f"({M.name}, {N.name})", ok, None if ok else [M.name, N.name])
    return rep


# -------------------------------------------------------------- Hopf case

def convolution_inverse(gamma):
    """Solve Σ Γ⁻¹(h₁,g₁)Γ(h₂,g₂) = ε(h)ε(g) for a k-valued cocycle."""
    l = gamma.host
    if l.d != 1:
        raise AlgebraError("convolution inverse needs base = ground field")
    fld = l.field
    n = l.n
    cops = [l.split2(l.coproduct[X]) for X in range(n)]
    g = [[gamma.table[i][j].get(0, fld.zero) for j in range(n)] for i in range(n)]
    eps = [l.counit[X].get(0, fld.zero) for X in range(n)]
    N = n * n
    A = fld.matrix(2 * N, N)
    rhs = [fld.zero] * (2 * N)
    for h in range(n):
        for k in range(n):
            r = h * n + k
            rhs[r] = eps[h] * eps[k]
            rhs[N + r] = eps[h] * eps[k]
            for h1, h2, c1 in cops[h]:
                for k1, k2, c2 in cops[k]:
                    A[r, h1 * n + k1] += c1 * c2 * g[h2][k2]
                    A[N + r, h2 * n + k2] += c1 * c2 * g[h1][k1]
    from .exactla import NoSolution, solve
    try:
        sol = solve(A, rhs)
    except NoSolution as exc:
        raise NotConvolutionInvertible("Γ has no convolution inverse") from exc
    return [[{0: sol[i * n + j]} if sol[i * n + j] != 0 else {} for j in range(n)] for i in range(n)]


def hopf_case_compare(gamma):
    """Compare L^Γ with the classical Drinfeld cotwist via ψ(h) = h₁Γ(h₂, S(h₃))."""
    l = gamma.host
    if l.d != 1:
        raise AlgebraError("Hopf case needs base = ground field")
    fld = l.field
    n = l.n
    L = l.total
    rep = Report(f"Hopf-case comparison {l.name}")
    ginv = convolution_inverse(gamma)
    rep.add("convolution invertible", True)
    hg = cotwist(gamma)
    S = antipode(l)
    gi = lambda i, j: ginv[i][j].get(0, fld.zero)
    ga = lambda i, j: gamma.table[i][j].get(0, fld.zero)
    cops = [l.split2(l.coproduct[X]) for X in range(n)]

    def delta3(X):
        """Δ²(X) as (a, b, c, coeff)."""
        out = []
        for a, bc, c1 in cops[X]:
            for b, c, c2 in cops[bc]:
                out.append((a, b, c, c1 * c2))
        return out

    # Drinfeld cotwist product
    dtable = []
    for h in range(n):
        row = []
        for g in range(n):
            acc = {}
            for h1, h2, h3, ch in delta3(h):
                for g1, g2, g3, cg in delta3(g):
                    coeff = ch * cg * ga(h1, g1) * gi(h3, g3)
                    if coeff != 0:
                        sp_add(acc, L.table[h2][g2], coeff)
            row.append(acc)
        dtable.append(row)
    HD = FiniteAlgebra(fld, dtable, dict(L.unit), names=L.names, name=f"{L.name}_D")
    try:
        HD.verify()
        rep.add("Drinfeld cotwist is an algebra", True)
    except AlgebraError as exc:
        rep.add("Drinfeld cotwist is an algebra", False, exc.witness)
    # ψ
    psi = []
    for h in range(n):
        acc = {}
        for h1, h2, h3, c in delta3(h):
            coeff = c * gamma({h2: fld.one}, S[h3]).get(0, fld.zero)
            if coeff != 0:
                sp_add(acc, {h1: fld.one}, coeff)
        psi.append(acc)
    mat = fld.from_sparse_cols(n, psi)
    rep.add("ψ bijective", mat.rank() == n, [mat.rank(), n])
    img = lambda v: _lin(psi, v)
    w = None
    for h in range(n):
        for g in range(n):
            if img(hg.total.table[h][g]) != HD.mul(psi[h], psi[g]):
                w = w or (h, g)
    rep.add("ψ algebra map", w is None, w)
    rep.add("ψ unital", img(hg.total.unit) == HD.unit)
    w = None
    for h in range(n):
        lhs = _lin2(psi, hg.coproduct[h], n)
        rhs = l.delta(psi[h])
        if l.diamond.project(lhs) != l.diamond.project(rhs):
            w = w or (h,)
        if l.eps(psi[h]) != hg.counit[h]:
            w = w or ("counit", h)
    rep.add("ψ coalgebra map", w is None, w)
    # closed form Δ^Γ(h) = h₁Γ⁻¹(S(h₂),h₃) ⊗ h₄
    w = None
    for h in range(n):
        acc = {}
        for a, b, cd, c1 in delta3(h):
            for c_, d_, c2 in cops[cd]:
                coeff = c1 * c2 * _scalar(gi, S[b], c_)
                if coeff != 0:
                    sp_add(acc, {a * n + d_: fld.one}, coeff)
        if l.diamond.project(acc) != l.diamond.project(hg.coproduct[h]):
            w = w or (h,)
    rep.add("coproduct closed form", w is None, w)
    rep.drinfeld = HD
    rep.psi = psi
    rep.cotwisted = hg
    rep.inverse = ginv
    return rep


def _scalar(f, vec, j):
    out = 0
    for i, c in vec.items():
        out += c * f(i, j)
    return out


def _lin(images, vec):
    out = {}
    for i, c in vec.items():
        sp_add(out, images[i], c)
    return out


def _lin2(images, vec, n):
    out = {}
    for k, c in vec.items():
        i, j = divmod(k, n)
        sp_add(out, tensor_vec([images[i], images[j]], (n, n)), c)
    return out
