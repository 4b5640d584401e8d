"""Finite-dimensional algebras, operators and balanced tensor spaces.

An operator ("op") on a space of dimension n is a list of n sparse columns.
Tensor spaces are indexed in mixed radix with factor 0 most significant.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .exactla import (
    Echelon, QuotientSpace, kernel_basis, make_quotient, sp_add, sp_clean,
)


class AlgebraError(ValueError):
    code = "AlgebraError"

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotAssociative(AlgebraError):
    code = "NotAssociative"


class BadUnit(AlgebraError):
    code = "BadUnit"


class NotCommutative(AlgebraError):
    code = "NotCommutative"


class MissingAction(AlgebraError):
    code = "MissingAction"


# ------------------------------------------------------------------ ops

def op_apply(op, vec):
    out = {}
    for j, v in vec.items():
        col = op[j]
        if col:
            sp_add(out, col, v)
    return out


def op_compose(a, b):
    """a after b."""
    return [op_apply(a, col) for col in b]


def op_identity(n, fld):
    return [{i: fld.one} for i in range(n)]


def op_zero(n):
    return [{} for _ in range(n)]


def op_lincomb(ops_coeffs, n):
    """Sum of c * op for (op, c) pairs."""
    out = [dict() for _ in range(n)]
    for op, c in ops_coeffs:
        for j in range(n):
            if op[j]:
                sp_add(out[j], op[j], c)
    return out


def op_to_mat(fld, op, nrows):
    return fld.from_sparse_cols(nrows, op)


def op_from_mat(m):
    nr, nc = m.nrows(), m.ncols()
    cols = []
    for j in range(nc):
        col = {}
        for i in range(nr):
            e = m[i, j]
            if e != 0:
                col[i] = e
        cols.append(col)
    return cols


def op_equal(a, b):
    return len(a) == len(b) and all(x == y for x, y in zip(a, b))


def tensor_vec(vecs, dims):
    """Tensor product of sparse vectors, flattened in mixed radix."""
    acc = {0: None}
    for v, n in zip(vecs, dims):
        nxt = {}
        for idx, c in acc.items():
            base = idx * n
            for i, x in v.items():
                nxt[base + i] = x if c is None else c * x
        acc = nxt
    return sp_clean(acc)


def flat_index(tup, dims):
    idx = 0
    for i, n in zip(tup, dims):
        idx = idx * n + i
    return idx


def unflatten(idx, dims):
    out = []
    for n in reversed(dims):
        idx, r = divmod(idx, n)
        out.append(r)
    return tuple(reversed(out))


# -------------------------------------------------------------- algebras

class FiniteAlgebra:
    """Unital associative algebra given by structure constants.

    ``table[i][j]`` is the sparse coefficient vector of e_i e_j.
    """

    def __init__(self, field, table, unit, names=None, name="", commutative=None):
        self.field = field
        self.table = table
        self.dim = len(table)
        self.unit = sp_clean(unit)
        self.names = list(names) if names else [f"e{i}" for i in range(self.dim)]
        self.name = name
        self._commutative = commutative
        self._lmats = None
        self._lops = {}
        self._rops = {}

    # basic arithmetic
    def zero(self):
        return {}

    def one(self):
        return dict(self.unit)

    def basis(self, i):
        return {i: self.field.one}

    def mul(self, u, v):
        out = {}
        tab = self.table
        for i, a in u.items():
            row = tab[i]
            for j, b in v.items():
                prod_ = row[j]
                if prod_:
                    sp_add(out, prod_, a * b)
        return out

    def mul_many(self, *vs):
        out = vs[0]
        for v in vs[1:]:
            out = self.mul(out, v)
        return out

    def left_op(self, u):
        """Operator of left multiplication by u."""
        return [self.mul(u, {j: self.field.one}) for j in range(self.dim)]

    def right_op(self, u):
        return [self.mul({j: self.field.one}, u) for j in range(self.dim)]

    def left_basis_op(self, i):
        op = self._lops.get(i)
        if op is None:
            op = [dict(self.table[i][j]) for j in range(self.dim)]
            self._lops[i] = op
        return op

    def right_basis_op(self, i):
        op = self._rops.get(i)
        if op is None:
            op = [dict(self.table[j][i]) for j in range(self.dim)]
            self._rops[i] = op
        return op

    def left_mats(self):
        if self._lmats is None:
            self._lmats = [op_to_mat(self.field, self.left_basis_op(i), self.dim)
                           for i in range(self.dim)]
        return self._lmats

    @property
    def commutative(self):
        if self._commutative is None:
            self._commutative = self.find_noncommuting() is None
        return self._commutative

    def find_noncommuting(self):
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                if self.table[i][j] != self.table[j][i]:
                    return (i, j)
        return None

    def find_nonassociative(self):
        """First basis triple with (e_i e_j) e_k != e_i (e_j e_k), or None.

        Large algebras are checked with the first factor running over a
        generating set whose right-nested words span the algebra; associativity
        for those triples implies it everywhere by induction on word length.
        """
        n = self.dim
        if n == 0:
            return None
        firsts = range(n)
        if n > 24:
            gens = generators(self)
            if _left_words_span(self, gens):
                firsts = gens
        tab = self.table
        for i in firsts:
            row_i = tab[i]
            for j in range(n):
                xij = row_i[j]
                row_j = tab[j]
                for k in range(n):
                    lhs = {}
                    for m, c in xij.items():
                        p = tab[m][k]
                        if p:
                            sp_add(lhs, p, c)
                    rhs = {}
                    for m, c in row_j[k].items():
                        p = row_i[m]
                        if p:
                            sp_add(rhs, p, c)
                    if lhs != rhs:
                        return (i, j, k)
        return None

    def find_bad_unit(self):
        one = self.unit
        for i in range(self.dim):
            e = {i: self.field.one}
            if self.mul(one, e) != e or self.mul(e, one) != e:
                return i
        return None

    def verify(self):
        """Raise on the first violated axiom."""
        bad = self.find_bad_unit()
        if bad is not None:
            raise BadUnit(f"unit fails against basis element {self.names[bad]}", witness=[bad])
        tri = self.find_nonassociative()
        if tri is not None:
            raise NotAssociative(f"associativity fails on basis triple {tri}", witness=list(tri))
        if self._commutative:
            pair = self.find_noncommuting()
            if pair is not None:
                raise NotCommutative(f"declared commutative but {pair} do not commute",
                                     witness=list(pair))
        return self

    def same_structure(self, other):
        return (self.dim == other.dim and self.table == other.table
                and self.unit == other.unit)

    def __repr__(self):
        return f"FiniteAlgebra({self.name or '?'}, dim={self.dim}, field={self.field.name})"


def _left_words_span(alg, gens):
    """Do the words g1(g2(...(gk))) in the given generators span alg?"""
    fld = alg.field
    span = Echelon()
    span.insert(alg.unit)
    queue = [dict(alg.unit)]
    while queue:
        v = queue.pop()
        for g in gens:
            w = alg.mul({g: fld.one}, v)
            if w and span.insert(w):
                queue.append(w)
    return span.rank == alg.dim


def make_algebra(field, dim, mul, unit, names=None, name="", commutative=None, check=True):
    """Build an algebra from (i, j, k, coeff) entries: e_i e_j has coefficient coeff on e_k."""
    table = [[{} for _ in range(dim)] for _ in range(dim)]
    for entry in mul:
        i, j, k, c = entry[0], entry[1], entry[2], entry[3]
        if not all(0 <= x < dim for x in (i, j, k)):
            raise AlgebraError(f"structure constant index out of range: {entry[:3]}")
        c = field(c) if not isinstance(c, tuple) else field(c[0], c[1])
        sp_add(table[i][j], {k: c})
    if isinstance(unit, dict):
        u = {k: field(v) for k, v in unit.items()}
    else:
        u = {k: field(v) for k, v in enumerate(unit) if v != 0}
    alg = FiniteAlgebra(field, table, u, names=names, name=name, commutative=commutative)
    if check:
        alg.verify()
    return alg


def algebra_from_table(field, table, unit, **kw):
    alg = FiniteAlgebra(field, table, unit, **kw)
    return alg


def opposite(alg):
    n = alg.dim
    table = [[dict(alg.table[j][i]) for j in range(n)] for i in range(n)]
    names = [f"{x}'" if not x.endswith("'") else x[:-1] for x in alg.names]
    return FiniteAlgebra(alg.field, table, dict(alg.unit), names=names,
                         name=f"{alg.name}^op", commutative=alg._commutative)


def tensor_algebra(a, b, name=""):
    """a ⊗ b with componentwise product; index i*dim(b) + j."""
    na, nb = a.dim, b.dim
    table = [[None] * (na * nb) for _ in range(na * nb)]
    for i in range(na):
        for j in range(nb):
            for k in range(na):
                ak = a.table[i][k]
                for l in range(nb):
                    bl = b.table[j][l]
                    out = {}
                    for x, cx in ak.items():
                        for y, cy in bl.items():
                            out[x * nb + y] = cx * cy
                    table[i * nb + j][k * nb + l] = sp_clean(out)
    unit = {}
    for x, cx in a.unit.items():
        for y, cy in b.unit.items():
            unit[x * nb + y] = cx * cy
    names = [f"{p}⊗{q}" for p in a.names for q in b.names]
    comm = None
    if a._commutative is not None and b._commutative is not None:
        comm = a._commutative and b._commutative
    return FiniteAlgebra(a.field, table, unit, names=names, name=name or f"{a.name}⊗{b.name}",
                         commutative=comm)


def enveloping(alg):
    """B ⊗ B̄ with (a⊗a')(c⊗c') = ac ⊗ c'a'; index a*dim + a'."""
    env = tensor_algebra(alg, opposite(alg), name=f"{alg.name}^e")
    env.names = [f"{p}⊗{q}" for p in alg.names for q in alg.names]
    return env


def embed_left(alg, a):
    """a ↦ a⊗1 in the enveloping algebra."""
    n = alg.dim
    out = {}
    for x, cx in a.items():
        for y, cy in alg.unit.items():
            out[x * n + y] = cx * cy
    return out


def embed_right(alg, a):
    """a ↦ 1⊗a in the enveloping algebra."""
    n = alg.dim
    out = {}
    for x, cx in alg.unit.items():
        for y, cy in a.items():
            out[x * n + y] = cx * cy
    return out


def generators(alg):
    """A small set of basis indices generating alg as a unital algebra (greedy)."""
    fld = alg.field
    gens = []
    span = Echelon()
    span.insert(alg.unit)
    basis_vecs = [dict(alg.unit)]

    def close(new_vecs):
        queue = list(new_vecs)
        while queue:
            v = queue.pop()
            for g in gens:
                for w in (alg.mul({g: fld.one}, v), alg.mul(v, {g: fld.one})):
                    if w and span.insert(w):
                        basis_vecs.append(w)
                        queue.append(w)

    for i in range(alg.dim):
        if span.contains({i: fld.one}):
            continue
        gens.append(i)
        fresh = []
        e = {i: fld.one}
        if span.insert(e):
            basis_vecs.append(e)
            fresh.append(e)
        close(list(basis_vecs))
        if span.rank == alg.dim:
            break
    return gens


# ------------------------------------------------------------- bimodules

@dataclass
class Bimodule:
    """Vector space with a left action of one algebra and a right action of another.

    ``left[a]`` is the op of the a-th basis element acting on the left;
    ``right[a]`` is the op of m ↦ m·e_a.
    """

    dim: int
    left_algebra: FiniteAlgebra | None = None
    left: list | None = None
    right_algebra: FiniteAlgebra | None = None
    right: list | None = None
    name: str = ""

    def verify(self):
        fails = []
        fld = (self.left_algebra or self.right_algebra).field
        if self.left is not None:
            alg = self.left_algebra
            for a in range(alg.dim):
                for b in range(alg.dim):
                    lhs = op_compose(self.left[a], self.left[b])
                    rhs = op_lincomb([(self.left[k], c) for k, c in alg.table[a][b].items()], self.dim)
                    if not op_equal(lhs, rhs):
                        fails.append(("left action", a, b))
            unit = op_lincomb([(self.left[k], c) for k, c in alg.unit.items()], self.dim)
            if not op_equal(unit, op_identity(self.dim, fld)):
                fails.append(("left unit",))
        if self.right is not None:
            alg = self.right_algebra
            for a in range(alg.dim):
                for b in range(alg.dim):
                    # (m a) b = m (ab)
                    lhs = op_compose(self.right[b], self.right[a])
                    rhs = op_lincomb([(self.right[k], c) for k, c in alg.table[a][b].items()], self.dim)
                    if not op_equal(lhs, rhs):
                        fails.append(("right action", a, b))
            unit = op_lincomb([(self.right[k], c) for k, c in alg.unit.items()], self.dim)
            if not op_equal(unit, op_identity(self.dim, fld)):
                fails.append(("right unit",))
        if self.left is not None and self.right is not None:
            for a in range(len(self.left)):
                for b in range(len(self.right)):
                    if not op_equal(op_compose(self.left[a], self.right[b]),
                                    op_compose(self.right[b], self.left[a])):
                        fails.append(("commute", a, b))
        return fails


# ------------------------------------------------------ balanced tensors

@dataclass
class Relation:
    """u ⊗ λ(a) z ≡ ρ(a) u ⊗ z for every basis element a of ``algebra``.

    ``lam[a]`` acts on factor ``target``; ``rho[a]`` maps factor index → op
    for factors other than the target.  Validity of the fast path needs λ to be a
    left action and ρ a right action of ``algebra``.
    """

    target: int
    algebra: FiniteAlgebra
    lam: list
    rho: list
    label: str = ""


DENSE_LIMIT = 200


class BalancedSpace(QuotientSpace):
    """Tensor product of factor spaces modulo balancing relations."""

    def __init__(self, field, dims, relations, trusted=False, name="", force=None):
        self.field = field
        self.dims = tuple(dims)
        self.relations = list(relations)
        self.name = name
        self.ambient_dim = 1
        for n in self.dims:
            self.ambient_dim *= n
        self._img_cache = {}
        self.trusted = trusted
        self.method = None
        impl = None
        if force != "dense" and (self.ambient_dim > DENSE_LIMIT or force == "free"):
            impl = _FreeImpl.build(self, trusted)
            if impl is None and force == "free":
                raise AlgebraError(f"free-module fast path not applicable to {name}")
        if impl is None:
            impl = _DenseImpl(self)
        self.impl = impl
        self.method = impl.kind
        self.dim = impl.dim

    def _project_basis(self, i):
        return self.impl.project_basis(i)

    def section(self, j):
        return self.impl.section(j)

    def relation_rows(self, all_basis=True):
        """Sparse relation rows (used by the dense path and by tests)."""
        rows = []
        fld = self.field
        dims = self.dims
        for rel in self.relations:
            elems = range(rel.algebra.dim)
            for a in elems:
                lam = rel.lam[a]
                rho = rel.rho[a]
                for idx in range(self.ambient_dim):
                    tup = unflatten(idx, dims)
                    vecs = [{t: fld.one} for t in tup]
                    left = list(vecs)
                    for f, op in rho.items():
                        left[f] = op[tup[f]]
                    right = list(vecs)
                    right[rel.target] = lam[tup[rel.target]]
                    row = tensor_vec(left, dims)
                    sp_add(row, tensor_vec(right, dims), -fld.one)
                    if row:
                        rows.append(row)
        return rows


class _DenseImpl:
    kind = "rref"

    def __init__(self, space):
        rows = space.relation_rows()
        self.q = make_quotient(space.ambient_dim, rows, field=space.field)
        self.dim = self.q.dim

    def project_basis(self, i):
        return self.q.basis_image(i)

    def section(self, j):
        return self.q.section(j)


class _FreeImpl:
    """Quotient via free-module bases of the target factors.

    For a relation with target factor j where the target factor is a free
    module under λ with generators p_k, every tensor reduces uniquely to
    Σ ρ(a)u ⊗ p_k.  Coordinates: targets carry generator labels, other
    factors keep their basis index.
    """

    kind = "free"

    @classmethod
    def build(cls, space, trusted):
        rels = sorted(space.relations, key=lambda r: -r.target)
        targets = [r.target for r in rels]
        if len(set(targets)) != len(targets):
            return None
        for r in rels:
            if any(f >= r.target for f in r.rho[0].keys()) if r.rho else False:
                return None
        if not trusted and not cls._valid(space, rels):
            return None
        decs = []
        for r in rels:
            d = cls._decompose(space.field, space.dims[r.target], r)
            if d is None:
                return None
            decs.append(d)
        return cls(space, rels, decs)

    @staticmethod
    def _valid(space, rels):
        fld = space.field
        for r in rels:
            alg = r.algebra
            n = space.dims[r.target]
            lin = lambda ops, coeffs, dim: op_lincomb([(ops[k], c) for k, c in coeffs.items()], dim)
            if not op_equal(lin(r.lam, alg.unit, n), op_identity(n, fld)):
                return False
            factors = set()
            for m in r.rho:
                factors.update(m.keys())
            for f in factors:
                nf = space.dims[f]
                ops = [m.get(f) or op_identity(nf, fld) for m in r.rho]
                if not op_equal(lin(ops, alg.unit, nf), op_identity(nf, fld)):
                    return False
            for a in range(alg.dim):
                for b in range(alg.dim):
                    ab = alg.table[a][b]
                    if not op_equal(op_compose(r.lam[a], r.lam[b]), lin(r.lam, ab, n)):
                        return False
                    for f in factors:
                        nf = space.dims[f]
                        ops = [m.get(f) or op_identity(nf, fld) for m in r.rho]
                        if not op_equal(op_compose(ops[b], ops[a]), lin(ops, ab, nf)):
                            return False
        # ops of later relations must commute with the ops of earlier ones on shared factors
        for hi in rels:
            for lo in rels:
                if lo.target >= hi.target:
                    continue
                for a in range(hi.algebra.dim):
                    for f, op in hi.rho[a].items():
                        if f == lo.target:
                            for b in range(lo.algebra.dim):
                                if not op_equal(op_compose(op, lo.lam[b]), op_compose(lo.lam[b], op)):
                                    return False
                        for b in range(lo.algebra.dim):
                            other = lo.rho[b].get(f)
                            if other is not None and not op_equal(op_compose(op, other),
                                                                  op_compose(other, op)):
                                return False
        return True

    @staticmethod
    def _decompose(fld, n, rel, attempts=None):
        """Free generators p_k of the target factor and the inverse change of basis.

        Basis vectors are tried first; seeded random combinations cover modules
        (like B⊗B̄ over a split B) where no basis vector generates freely.
        """
        d = rel.algebra.dim
        if n % d:
            return None
        span = Echelon()
        gens = []

        def block(g):
            return [op_apply(rel.lam[a], g) for a in range(d)]

        def try_add(g):
            nonlocal span
            trial = span.copy()
            if all(trial.insert(v) for v in block(g)):
                span = trial
                gens.append(g)
                return True
            return False

        for c in range(n):
            if span.rank == n:
                break
            if not span.contains({c: fld.one}):
                try_add({c: fld.one})
        rng = random.Random(1729)
        tries = attempts if attempts is not None else 4 * (n // d) + 8
        while span.rank < n and tries > 0:
            tries -= 1
            g = {c: fld(rng.randint(-3, 3)) for c in range(n)}
            try_add(sp_clean(g))
        if span.rank != n:
            return None
        cols = [v for g in gens for v in block(g)]
        m = fld.from_sparse_cols(n, cols)
        inv = m.inv()
        dec = []
        for e in range(n):
            terms = []
            for row in range(n):
                c = inv[row, e]
                if c != 0:
                    k, a = divmod(row, d)
                    terms.append((k, a, c))
            dec.append(terms)
        return {"gens": gens, "dec": dec, "rank": len(gens)}

    def __init__(self, space, rels, decs):
        self.space = space
        self.rels = rels
        self.decs = decs
        out_dims = list(space.dims)
        for r, d in zip(rels, decs):
            out_dims[r.target] = d["rank"]
        self.out_dims = tuple(out_dims)
        self.dim = 1
        for x in out_dims:
            self.dim *= x
        self.label_factors = {r.target: d for r, d in zip(rels, decs)}

    def project_basis(self, i):
        state = {unflatten(i, self.space.dims): self.space.field.one}
        for r, d in zip(self.rels, self.decs):
            t = r.target
            nxt = {}
            for tup, c in state.items():
                for k, a, cf in d["dec"][tup[t]]:
                    partial = {tup[:t] + (k,) + tup[t + 1:]: c * cf}
                    for f, op in r.rho[a].items():
                        expanded = {}
                        for tp, cc in partial.items():
                            for x, v in op[tp[f]].items():
                                key = tp[:f] + (x,) + tp[f + 1:]
                                w = expanded.get(key)
                                expanded[key] = cc * v if w is None else w + cc * v
                        partial = expanded
                    for key, v in partial.items():
                        w = nxt.get(key)
                        nxt[key] = v if w is None else w + v
            state = {k: v for k, v in nxt.items() if v != 0}
        out = {}
        for tup, c in state.items():
            out[flat_index(tup, self.out_dims)] = c
        return out

    def section(self, j):
        tup = unflatten(j, self.out_dims)
        fld = self.space.field
        vecs = []
        for f, x in enumerate(tup):
            d = self.label_factors.get(f)
            vecs.append(d["gens"][x] if d else {x: fld.one})
        return tensor_vec(vecs, self.space.dims)


def takeuchi_condition(space, right_ops_first, right_ops_second):
    """Maps v ↦ v·(ρ1(b)⊗1) − v·(1⊗ρ2(b)) for each b; returns a checker.

    ``right_ops_first[b]`` acts on factor 0, ``right_ops_second[b]`` on factor 1.
    """
    dims = space.dims

    def defect(vec, b):
        out = {}
        op1 = right_ops_first[b]
        op2 = right_ops_second[b]
        n1 = dims[1]
        for idx, c in vec.items():
            i, j = divmod(idx, n1)
            for x, v in op1[i].items():
                sp_add(out, {x * n1 + j: v}, c)
            for y, v in op2[j].items():
                sp_add(out, {i * n1 + y: v}, -c)
        return space.project(out)

    return defect


@dataclass
class TakeuchiSubspace:
    host: BalancedSpace
    ops_first: list
    ops_second: list
    _basis: list | None = None

    def defect(self, vec, b):
        return takeuchi_condition(self.host, self.ops_first, self.ops_second)(vec, b)

    def contains(self, vec):
        check = takeuchi_condition(self.host, self.ops_first, self.ops_second)
        return all(not check(vec, b) for b in range(len(self.ops_first)))

    def first_defect(self, vec):
        check = takeuchi_condition(self.host, self.ops_first, self.ops_second)
        for b in range(len(self.ops_first)):
            if check(vec, b):
                return b
        return None

    @property
    def basis(self):
        """Basis of the Takeuchi subspace in quotient coordinates."""
        if self._basis is None:
            host = self.host
            fld = host.field
            check = takeuchi_condition(host, self.ops_first, self.ops_second)
            nb = len(self.ops_first)
            m = fld.matrix(nb * host.dim, host.dim)
            for j in range(host.dim):
                rep = host.section(j)
                for b in range(nb):
                    for k, v in check(rep, b).items():
                        m[b * host.dim + k, j] = v
            self._basis = kernel_basis(m)
        return self._basis

    @property
    def dim(self):
        return len(self.basis)


def balanced_tensor(m: Bimodule, n: Bimodule, kind="⋄", trusted=False):
    """M ⊗_B N style quotient built from the bimodule actions.

    ``m.right`` supplies the action on the first factor and ``n.left`` the one on
    the second; the kind only names the convention (all are u·a ⊗ v ≡ u ⊗ a·v).
    """
    if m.right is None or n.left is None:
        raise MissingAction(f"{kind} needs a right action on the first factor and a left action on the second")
    alg = n.left_algebra
    rel = Relation(target=1, algebra=alg, lam=n.left, rho=[{0: op} for op in m.right], label=kind)
    return BalancedSpace(alg.field, (m.dim, n.dim), [rel], trusted=trusted, name=kind)


def check_map(f, kind, src, dst, images=None):
    """Check a linear map between algebras given by images of basis elements.

    kind: 'algebra' | 'antialgebra' | 'unital'.  Returns (ok, witness).
    """
    imgs = images if images is not None else [f({i: src.field.one}) for i in range(src.dim)]

    def image(vec):
        out = {}
        for i, c in vec.items():
            sp_add(out, imgs[i], c)
        return out

    if image(src.unit) != dst.unit:
        return False, ("unit",)
    if kind == "unital":
        return True, None
    for a in range(src.dim):
        for b in range(src.dim):
            lhs = image(src.table[a][b])
            if kind == "algebra":
                rhs = dst.mul(imgs[a], imgs[b])
            else:
                rhs = dst.mul(imgs[b], imgs[a])
            if lhs != rhs:
                return False, (a, b)
    return True, None


# ---------------------------------------------------------------- reports

def _jsonable(x):
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    # flint scalars
    try:
        return [int(x.p), int(x.q)]
    except AttributeError:
        return [int(x), 1]


@dataclass
class Check:
    name: str
    ok: bool
    witness: object = None
    note: str = ""

    def to_dict(self):
        d = {"name": self.name, "status": "pass" if self.ok else "fail"}
        if self.witness is not None:
            d["witness"] = _jsonable(self.witness)
        if self.note:
            d["note"] = self.note
        return d


class Report:
    """Ordered list of named pass/fail checks."""

    def __init__(self, title=""):
        self.title = title
        self.checks = []

    def add(self, name, ok, witness=None, note=""):
        self.checks.append(Check(name, bool(ok), witness, note))
        return ok

    def extend(self, other, prefix=""):
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.ok, c.witness, c.note))
        return self

    @property
    def ok(self):
        return all(c.ok for c in self.checks)

    @property
    def failures(self):
        return [c for c in self.checks if not c.ok]

    def get(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self):
        return {"title": self.title, "ok": self.ok, "checks": [c.to_dict() for c in self.checks]}

    def __repr__(self):
        return f"Report({self.title!r}, {len(self.checks)} checks, ok={self.ok})"
