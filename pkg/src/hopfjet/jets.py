"""Pair Hopf algebroids, ideal powers of the universal calculus, jet spaces."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .algcore import (
    AlgebraError, FiniteAlgebra, NotCommutative, Report, embed_left, embed_right,
    enveloping, tensor_vec,
)
from .algebroid import AxiomFailure, check_hopf_ideal, make_bialgebroid, quotient_hopf_algebroid
from .exactla import Subspace, dense_to_sp, kernel_basis, make_quotient, sp_add

STABILIZATION_CAP = 16


class NotStabilized(AlgebraError):
    code = "NotStabilized"


class NotSubBimodule(AlgebraError):
    code = "NotSubBimodule"


# --------------------------------------------------------------- pair

def pair_hopf_algebroid(b, strict=True):
    """B⊗B̄ with s(a) = a⊗1, t(a) = 1⊗a, Δ(a⊗a') = a⊗1 ⋄ 1⊗a', ε(a⊗a') = aa'."""
    env = enveloping(b)
    d = b.dim
    fld = b.field
    src = [embed_left(b, {a: fld.one}) for a in range(d)]
    tgt = [embed_right(b, {a: fld.one}) for a in range(d)]
    cop, cou = [], []
    for a in range(d):
        for a2 in range(d):
            cop.append(tensor_vec([src[a], tgt[a2]], (d * d, d * d)))
            cou.append(dict(b.table[a][a2]))
    return make_bialgebroid(env, b, src, tgt, cop, cou, name=f"pair({b.name})", strict=strict)


def pair_closed_forms(l, b):
    """Compare both translation maps of a pair algebroid with their closed forms."""
    rep = Report(f"pair closed forms {l.name}")
    d = b.dim
    fld = b.field
    w = None
    for a in range(d):
        for a2 in range(d):
            X = a * d + a2
            want = l.bar.project(l.t2(embed_left(b, {a: fld.one}), embed_left(b, {a2: fld.one})))
            if l.tm.coords[X] != want:
                w = w or (a, a2)
    rep.add("translation map closed form", w is None, w)
    w = None
    for a in range(d):
        for a2 in range(d):
            X = a * d + a2
            want = l.under.project(l.t2(embed_right(b, {a2: fld.one}), embed_right(b, {a: fld.one})))
            if l.atm.coords[X] != want:
                w = w or (a, a2)
    rep.add("anti-translation map closed form", w is None, w)
    return rep


# ------------------------------------------------------------- calculus

def d_uni(b, a):
    """1⊗a − a⊗1 in B⊗B̄."""
    out = dict(embed_right(b, a))
    sp_add(out, embed_left(b, a), -b.field.one)
    return out


def mult_matrix(b):
    d = b.dim
    m = b.field.matrix(d, d * d)
    for i in range(d):
        for j in range(d):
            for k, c in b.table[i][j].items():
                m[k, i * d + j] = c
    return m


def universal_calculus(b):
    """Basis of μ = ker(m : B⊗B → B)."""
    return [dense_to_sp(v) for v in kernel_basis(mult_matrix(b))]


@dataclass
class JetChain:
    algebra: FiniteAlgebra
    mu: list
    powers: list = dc_field(default_factory=list)
    stabilized_at: int | None = None

    @property
    def env(self):
        if not hasattr(self, "_env"):
            self._env = enveloping(self.algebra)
        return self._env

    def extend(self, k):
        """Make μ_0..μ_k available; μ_k = span{x·d(a) : x ∈ μ_{k−1}}."""
        b = self.algebra
        env = self.env
        n = env.dim
        if not self.powers:
            self.powers.append(Subspace(b.field, n, self.mu))
        ds = [d_uni(b, {a: b.field.one}) for a in range(b.dim)]
        while len(self.powers) <= k:
            prev = self.powers[-1]
            vecs = [env.mul(x, da) for x in prev.basis for da in ds]
            nxt = Subspace(b.field, n, vecs)
            if self.stabilized_at is None and nxt == prev:
                self.stabilized_at = len(self.powers) - 1
            self.powers.append(nxt)
        return self.powers[k]

    def dims(self, k_max):
        self.extend(k_max)
        return [p.dim for p in self.powers[: k_max + 1]]

    def stabilize(self, cap=STABILIZATION_CAP):
        k = 0
        while self.stabilized_at is None and k <= cap:
            self.extend(k + 1)
            k += 1
        if self.stabilized_at is None or self.stabilized_at > cap:
            raise NotStabilized(f"μ_k chain does not stabilize within k ≤ {cap}", witness=[cap])
        return self.stabilized_at


def jet_chain(b):
    return JetChain(b, universal_calculus(b))


def mu_k(chain, k):
    return chain.extend(k)


# ------------------------------------------------------------- jet spaces

def _mu_coords(mu_space, vec):
    """Coordinates of vec ∈ μ against the echelon basis of μ."""
    return {i: vec[p] for i, p in enumerate(mu_space.pivots) if vec.get(p, 0) != 0}


@dataclass
class JetSpace:
    """J = B^e/N together with Ω = μ/N and the splitting maps.

    ``incl`` sends an Ω class ω to −[ω] so that π∘incl = id for
    π([a⊗b]) = (d a)b = 1⊗ab − a⊗b.
    """

    k: object
    base: FiniteAlgebra
    ideal: Subspace
    quotient: object
    mu: Subspace
    omega: object
    algebra: FiniteAlgebra | None = None

    @property
    def dim(self):
        return self.quotient.dim

    def m(self, vec):
        """Multiplication B^e → B (well defined on J)."""
        b = self.base
        d = b.dim
        out = {}
        for idx, c in vec.items():
            sp_add(out, b.table[idx // d][idx % d], c)
        return out

    def pi(self, coords):
        """π : J → Ω on quotient coordinates."""
        x = self.quotient.lift(coords)
        val = embed_right(self.base, self.m(x))
        sp_add(val, x, -self.base.field.one)
        return self.omega.project(_mu_coords(self.mu, val))

    def incl(self, coords):
        mu_vec = {}
        for i, c in self.omega.lift(coords).items():
            sp_add(mu_vec, self.mu.basis[i], -c)
        return self.quotient.project(mu_vec)

    def j(self, bvec):
        """Jet prolongation j(b) = [b⊗1]."""
        return self.quotient.project(embed_left(self.base, bvec))

    def check_splitting(self):
        rep = Report(f"splitting J^{self.k}")
        fld = self.base.field
        w = None
        for i in range(self.omega.dim):
            if self.pi(self.incl({i: fld.one})) != {i: fld.one}:
                w = w or (i,)
        rep.add("pi after incl is identity", w is None, w)
        rep.add("dim J = dim B + dim Omega", self.dim == self.base.dim + self.omega.dim,
                [self.dim, self.base.dim, self.omega.dim])
        # x ↦ (m(x), π(x)) is bijective
        d = self.base.dim
        mat = fld.matrix(d + self.omega.dim, self.dim)
        for j in range(self.dim):
            x = self.quotient.section(j)
            for r, c in self.m(x).items():
                mat[r, j] = c
            for r, c in self.pi({j: fld.one}).items():
                mat[d + r, j] = c
        rep.add("J = B ⊕ Omega", mat.rank() == self.dim and self.dim == mat.nrows())
        w = None
        for a in range(d):
            ja = self.j({a: fld.one})
            if self.m(self.quotient.lift(ja)) != {a: fld.one}:
                w = w or ("counit", a)
            if self.pi(ja) != self.omega.project(_mu_coords(self.mu, d_uni(self.base, {a: fld.one}))):
                w = w or ("pi of prolongation", a)
            for c in range(d):
                lhs = self.j(self.base.table[c][a])
                rhs = self.quotient.project(self.base_env.mul(embed_left(self.base, {c: fld.one}),
                                                              self.quotient.lift(ja)))
                if lhs != rhs:
                    w = w or ("left linear", c, a)
        rep.add("prolongation", w is None, w)
        return rep

    @property
    def base_env(self):
        if not hasattr(self, "_env"):
            self._env = enveloping(self.base)
        return self._env


def _build_jet(b, k, ideal):
    fld = b.field
    env = enveloping(b)
    n = env.dim
    q = make_quotient(n, ideal.basis, field=fld) if ideal.basis else make_quotient(n, [], field=fld)
    mu = Subspace(fld, n, universal_calculus(b))
    rel = [_mu_coords(mu, v) for v in ideal.basis]
    omega = make_quotient(mu.dim, rel, field=fld) if rel else make_quotient(mu.dim, [], field=fld)
    alg = None
    if b.commutative:
        secs = [q.section(j) for j in range(q.dim)]
        table = [[q.project(env.mul(x, y)) for y in secs] for x in secs]
        names = [env.names[next(iter(s))] for s in secs]
        alg = FiniteAlgebra(fld, table, q.project(env.unit), names=names, name=f"J^{k}({b.name})")
        alg.verify()
    return JetSpace(k, b, ideal, q, mu, omega, alg)


def jet_space(b, k, chain=None):
    chain = chain or jet_chain(b)
    return _build_jet(b, k, chain.extend(k))


def jet_splitting(b, k, chain=None):
    if not b.commutative:
        raise NotCommutative("jet splitting needs a commutative base")
    js = jet_space(b, k, chain)
    return js, js.check_splitting()


def first_order_jet(b, n_vectors):
    """J¹ := B^e/N for a sub-bimodule N ⊆ μ."""
    fld = b.field
    env = enveloping(b)
    N = Subspace(fld, env.dim, n_vectors)
    mu = Subspace(fld, env.dim, universal_calculus(b))
    for v in N.basis:
        if not mu.contains(v):
            raise NotSubBimodule("N is not contained in μ", witness=sorted(v))
    for i, v in enumerate(N.basis):
        for a in range(b.dim):
            for act, emb in (("left", embed_left), ("right", embed_right)):
                w = env.mul(emb(b, {a: fld.one}), v)
                if not N.contains(w):
                    raise NotSubBimodule(f"N not closed under the {act} action", witness=[i, a])
    return _build_jet(b, 1, N)


def jet_hopf_algebroid(b, cap=STABILIZATION_CAP, strict=True):
    """J(B) = B^e/μ_∞ for commutative B, with μ_∞ the stabilized ideal."""
    if not b.commutative:
        raise NotCommutative(f"{b.name} is not commutative", witness=list(b.find_noncommuting() or []))
    chain = jet_chain(b)
    k = chain.stabilize(cap)
    ideal = chain.powers[k]
    pair = pair_hopf_algebroid(b)
    rep, _ = check_hopf_ideal(pair, ideal.basis)
    if not rep.ok:
        bad = rep.failures[0]
        raise AxiomFailure(f"μ_∞ is not a Hopf ideal: {bad.name}", bad.witness, report=rep)
    jl = quotient_hopf_algebroid(pair, ideal.basis, name=f"J({b.name})", strict=strict)
    jl.chain = chain
    jl.pair = pair
    jl.hopf_ideal_report = rep
    jl.jet_base = b
    return jl
