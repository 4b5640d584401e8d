"""Exact scalars, matrices and presented quotient spaces.

Scalars are python-flint ``fmpq`` (rationals) or ``nmod`` (prime fields).
Dense matrices are flint matrices; sparse vectors are plain dicts
``{index: scalar}`` with no stored zeros.
"""
from __future__ import annotations

import heapq
from fractions import Fraction

import flint


class NoSolution(ValueError):
    """Raised when a linear system has no solution."""


def _is_prime(p):
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


class Field:
    """Ground field: the rationals or F_p."""

    def __init__(self, p=0):
        if p and not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.zero = self(0)
        self.one = self(1)

    @classmethod
    def Q(cls):
        return cls(0)

    @classmethod
    def Fp(cls, p):
        return cls(int(p))

    @classmethod
    def parse(cls, text):
        """Accept 'Q', 'Fp:7', {'Fp': 7}."""
        if isinstance(text, dict):
            return cls.Fp(text["Fp"])
        if text in (None, "Q", "QQ"):
            return cls.Q()
        if isinstance(text, str) and text.startswith("Fp:"):
            return cls.Fp(int(text[3:]))
        raise ValueError(f"unknown field {text!r}")

    @property
    def name(self):
        return "Q" if self.p == 0 else f"Fp:{self.p}"

    def to_json(self):
        return "Q" if self.p == 0 else {"Fp": self.p}

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("field", self.p))

    def __repr__(self):
        return f"Field({self.name})"

    def __call__(self, x, den=1):
        if isinstance(x, str):
            x = Fraction(x)
        if isinstance(x, Fraction):
            x, den = x.numerator, x.denominator * den
        if self.p == 0:
            if isinstance(x, flint.fmpq) and den == 1:
                return x
            if isinstance(x, flint.fmpq):
                return x / den
            return flint.fmpq(int(x), int(den))
        if isinstance(x, flint.nmod):
            x = int(x)
        if isinstance(x, flint.fmpq):
            x, den = int(x.p), int(x.q) * den
        num = flint.nmod(int(x), self.p)
        if den == 1:
            return num
        d = flint.nmod(int(den), self.p)
        if d == 0:
            raise ZeroDivisionError(f"denominator {den} vanishes mod {self.p}")
        return num / d

    def to_pair(self, x):
        if self.p == 0:
            return (int(x.p), int(x.q))
        return (int(x), 1)

    def to_str(self, x):
        a, b = self.to_pair(x)
        return str(a) if b == 1 else f"{a}/{b}"

    def matrix(self, rows, cols, entries=None):
        if entries is None:
            if self.p == 0:
                return flint.fmpq_mat(rows, cols)
            return flint.nmod_mat(rows, cols, self.p)
        if self.p == 0:
            return flint.fmpq_mat(rows, cols, entries)
        return flint.nmod_mat(rows, cols, [int(e) for e in entries], self.p)

    def from_rows(self, rows, ncols=None):
        rows = [list(r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        flat = []
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged rows")
            flat.extend(self(x) for x in r)
        return self.matrix(len(rows), ncols, flat)

    def from_sparse_cols(self, nrows, cols):
        """Matrix whose j-th column is the sparse dict cols[j]."""
        m = self.matrix(nrows, len(cols))
        for j, col in enumerate(cols):
            for i, v in col.items():
                m[i, j] = v
        return m

    def from_sparse_rows(self, ncols, rows):
        m = self.matrix(len(rows), ncols)
        for i, row in enumerate(rows):
            for j, v in row.items():
                m[i, j] = v
        return m

    def identity(self, n):
        m = self.matrix(n, n)
        for i in range(n):
            m[i, i] = self.one
        return m


QQ = Field.Q()


def field_of(m):
    if isinstance(m, flint.nmod_mat):
        return Field.Fp(m.modulus())
    return QQ


# ---------------------------------------------------------------- vectors

def sp_add(acc, vec, scale=None):
    """acc += scale*vec, in place; drops zeros."""
    for k, v in vec.items():
        if scale is not None:
            v = v * scale
        w = acc.get(k)
        if w is None:
            if v != 0:
                acc[k] = v
        else:
            w = w + v
            if w == 0:
                del acc[k]
            else:
                acc[k] = w
    return acc


def sp_scale(vec, c):
    if c == 0:
        return {}
    return {k: v * c for k, v in vec.items()}


def sp_clean(vec):
    return {k: v for k, v in vec.items() if v != 0}


def sp_to_dense(vec, n, zero):
    out = [zero] * n
    for k, v in vec.items():
        out[k] = v
    return out


def dense_to_sp(vals):
    return {i: v for i, v in enumerate(vals) if v != 0}


def mat_col(m, j):
    return {i: m[i, j] for i in range(m.nrows()) if m[i, j] != 0}


def mat_apply(m, vec):
    """m @ vec for a sparse vec, returned sparse."""
    out = {}
    rows = m.nrows()
    for j, v in vec.items():
        for i in range(rows):
            e = m[i, j]
            if e != 0:
                w = out.get(i)
                out[i] = e * v if w is None else w + e * v
    return sp_clean(out)


def mat_cols_sparse(m):
    """All columns of a flint matrix as sparse dicts (fast path via table)."""
    rows = m.table()
    nc = m.ncols()
    cols = [dict() for _ in range(nc)]
    for i, r in enumerate(rows):
        for j, e in enumerate(r):
            if e != 0:
                cols[j][i] = e
    return cols


# --------------------------------------------------------------- matrices

def rref(m):
    """Reduced row echelon form and pivot columns."""
    r, rank = m.rref()
    pivots = []
    nc = m.ncols()
    j = 0
    for i in range(rank):
        while j < nc and r[i, j] == 0:
            j += 1
        pivots.append(j)
        j += 1
    return r, pivots


def rank(m):
    if m.nrows() == 0 or m.ncols() == 0:
        return 0
    return m.rank()


def kernel_basis(m):
    """Basis of {v : m v = 0} as dense lists, one per free column."""
    fld = field_of(m)
    nc = m.ncols()
    r, piv = rref(m)
    pivset = set(piv)
    out = []
    for f in range(nc):
        if f in pivset:
            continue
        v = [fld.zero] * nc
        v[f] = fld.one
        for i, p in enumerate(piv):
            v[p] = -r[i, f]
        out.append(v)
    return out


def solve(a, b):
    """One solution x of a x = b, free variables set to zero."""
    fld = field_of(a)
    nr, nc = a.nrows(), a.ncols()
    b = [fld(x) for x in b]
    if len(b) != nr:
        raise ValueError("dimension mismatch")
    aug = fld.matrix(nr, nc + 1)
    for i in range(nr):
        for j in range(nc):
            aug[i, j] = a[i, j]
        aug[i, nc] = b[i]
    r, piv = rref(aug)
    if piv and piv[-1] == nc:
        raise NoSolution("right-hand side not in column space")
    x = [fld.zero] * nc
    for i, p in enumerate(piv):
        x[p] = r[i, nc]
    return x


def solve_many(a, bmat):
    """Solve a X = B column by column; returns X or raises NoSolution."""
    fld = field_of(a)
    nr, nc = a.nrows(), a.ncols()
    k = bmat.ncols()
    aug = fld.matrix(nr, nc + k)
    for i in range(nr):
        for j in range(nc):
            aug[i, j] = a[i, j]
        for j in range(k):
            aug[i, nc + j] = bmat[i, j]
    r, piv = rref(aug)
    if any(p >= nc for p in piv):
        raise NoSolution("some right-hand side not in column space")
    x = fld.matrix(nc, k)
    for i, p in enumerate(piv):
        for j in range(k):
            x[p, j] = r[i, nc + j]
    return x


def inverse(m):
    if m.nrows() != m.ncols():
        raise ValueError("not square")
    if m.nrows() == 0:
        return m
    return m.inv()


def row_space(m):
    """Nonzero rows of rref(m)."""
    r, piv = rref(m)
    return r, piv


# ---------------------------------------------------------------- quotients

class QuotientSpace:
    """Ambient space modulo a subspace, with a canonical section.

    Subclasses implement ``_project_basis(i)`` returning the quotient
    coordinates of the i-th ambient basis vector and ``section`` giving
    ambient representatives of quotient basis vectors.
    """

    field: Field
    ambient_dim: int
    dim: int

    def project(self, vec):
        out = {}
        for i, v in vec.items():
            col = self.basis_image(i)
            if col:
                sp_add(out, col, v)
        return out

    def basis_image(self, i):
        cache = self._img_cache
        r = cache.get(i)
        if r is None:
            r = self._project_basis(i)
            cache[i] = r
        return r

    def project_dense(self, vec):
        return sp_to_dense(self.project(vec), self.dim, self.field.zero)

    def is_zero(self, vec):
        return not self.project(vec)

    def lift(self, coords):
        if isinstance(coords, dict):
            items = coords.items()
        else:
            items = ((j, c) for j, c in enumerate(coords) if c != 0)
        out = {}
        for j, c in items:
            sp_add(out, self.section(j), c)
        return out

    def project_matrix(self, ambient_cols):
        """Flint matrix of projected sparse ambient vectors (as columns)."""
        return self.field.from_sparse_cols(self.dim, [self.project(c) for c in ambient_cols])


class DenseQuotient(QuotientSpace):
    """Quotient by the row space of a relation matrix; section = non-pivot coordinates."""

    def __init__(self, field, ambient_dim, relations=None):
        self.field = field
        self.ambient_dim = ambient_dim
        self._img_cache = {}
        if relations is None or relations.nrows() == 0:
            self.reduced = field.matrix(0, ambient_dim)
            self.pivots = []
        else:
            if relations.ncols() != ambient_dim:
                raise ValueError("relation width differs from ambient dimension")
            r, piv = rref(relations)
            self.reduced = r
            self.pivots = piv
        self.rank = len(self.pivots)
        pivset = set(self.pivots)
        self.free = [j for j in range(ambient_dim) if j not in pivset]
        self.dim = len(self.free)
        self._freepos = {j: k for k, j in enumerate(self.free)}
        self._pivrow = {p: i for i, p in enumerate(self.pivots)}

    @property
    def quotient_basis(self):
        return [{j: self.field.one} for j in self.free]

    def _project_basis(self, i):
        k = self._freepos.get(i)
        if k is not None:
            return {k: self.field.one}
        r = self._pivrow[i]
        red = self.reduced
        out = {}
        for k, f in enumerate(self.free):
            e = red[r, f]
            if e != 0:
                out[k] = -e
        return out

    def section(self, j):
        return {self.free[j]: self.field.one}

    def projection_matrix(self):
        m = self.field.matrix(self.dim, self.ambient_dim)
        for i in range(self.ambient_dim):
            for k, v in self.basis_image(i).items():
                m[k, i] = v
        return m


class Echelon:
    """Incrementally grown sparse echelon basis; rows keyed by leading index."""

    def __init__(self):
        self.rows = {}

    def copy(self):
        e = Echelon()
        e.rows = dict(self.rows)
        return e

    @property
    def rank(self):
        return len(self.rows)

    def reduce(self, vec):
        rows = self.rows
        vec = dict(vec)
        heap = [i for i in vec if i in rows]
        heapq.heapify(heap)
        while heap:
            i = heapq.heappop(heap)
            c = vec.pop(i, None)
            if c is None:
                continue
            for k, v in rows[i].items():
                if k == i:
                    continue
                w = vec.get(k)
                if w is None:
                    vec[k] = -c * v
                    if k in rows:
                        heapq.heappush(heap, k)
                else:
                    w = w - c * v
                    if w == 0:
                        del vec[k]
                    else:
                        vec[k] = w
        return vec

    def insert(self, vec):
        """Add vec; returns True when it was independent."""
        red = self.reduce(sp_clean(vec))
        if not red:
            return False
        lead = min(red)
        inv = 1 / red[lead]
        self.rows[lead] = {k: v * inv for k, v in red.items()}
        return True

    def contains(self, vec):
        return not self.reduce(vec)


class SparseQuotient(QuotientSpace):
    """Same canonical coordinates as DenseQuotient, built by sparse elimination.

    Suitable for large ambient spaces with sparse relation rows.
    """

    def __init__(self, field, ambient_dim, relation_rows):
        self.field = field
        self.ambient_dim = ambient_dim
        self._img_cache = {}
        self._ech = Echelon()
        for row in relation_rows:
            self._ech.insert(row)
        pivset = self._ech.rows
        self.pivots = sorted(pivset)
        self.free = [j for j in range(ambient_dim) if j not in pivset]
        self.dim = len(self.free)
        self.rank = len(self.pivots)
        self._freepos = {j: k for k, j in enumerate(self.free)}

    def _project_basis(self, i):
        red = self._ech.reduce({i: self.field.one})
        return {self._freepos[k]: v for k, v in red.items()}

    def section(self, j):
        return {self.free[j]: self.field.one}


def _chunked_rref_rows(field, ncols, rows, chunk=None):
    """Row-reduce many sparse rows in blocks; returns a flint matrix spanning them."""
    chunk = chunk or max(ncols, 64)
    basis = field.matrix(0, ncols)
    for start in range(0, len(rows), chunk):
        block = rows[start:start + chunk]
        nb = basis.nrows()
        m = field.matrix(nb + len(block), ncols)
        for i in range(nb):
            for j in range(ncols):
                e = basis[i, j]
                if e != 0:
                    m[i, j] = e
        for i, row in enumerate(block):
            for j, v in row.items():
                m[nb + i, j] = v
        r, rk = m.rref()
        basis = field.matrix(rk, ncols)
        for i in range(rk):
            for j in range(ncols):
                e = r[i, j]
                if e != 0:
                    basis[i, j] = e
    return basis


def make_quotient(ambient_dim, relations, field=None):
    """Quotient of k^ambient_dim by the row space of ``relations``.

    ``relations`` is a flint matrix, a list of dense rows, or a list of sparse dicts.
    """
    if isinstance(relations, (flint.fmpq_mat, flint.nmod_mat)):
        fld = field or field_of(relations)
        return DenseQuotient(fld, ambient_dim, relations)
    fld = field or QQ
    rows = list(relations or [])
    if rows and not isinstance(rows[0], dict):
        rows = [dense_to_sp([fld(x) for x in r]) for r in rows]
    if not rows:
        return DenseQuotient(fld, ambient_dim, None)
    if ambient_dim <= 1500:
        if len(rows) > 2 * ambient_dim:
            return DenseQuotient(fld, ambient_dim, _chunked_rref_rows(fld, ambient_dim, rows))
        return DenseQuotient(fld, ambient_dim, fld.from_sparse_rows(ambient_dim, rows))
    return SparseQuotient(fld, ambient_dim, rows)


# ---------------------------------------------------------------- subspaces

class Subspace:
    """Subspace of k^n given by an echelon basis (rows of a reduced matrix)."""

    def __init__(self, field, n, vectors=()):
        self.field = field
        self.n = n
        rows = [v if isinstance(v, dict) else dense_to_sp(v) for v in vectors]
        rows = [r for r in rows if r]
        if rows:
            r, piv = rref(field.from_sparse_rows(n, rows))
            tab = r.table()
            self.basis = [dense_to_sp(tab[i]) for i in range(len(piv))]
            self.pivots = piv
        else:
            self.basis = []
            self.pivots = []

    @property
    def dim(self):
        return len(self.basis)

    def contains(self, vec):
        if isinstance(vec, (list, tuple)):
            vec = dense_to_sp(vec)
        v = dict(vec)
        for row, p in zip(self.basis, self.pivots):
            c = v.get(p)
            if c is not None and c != 0:
                sp_add(v, row, -c)
        return not v

    def matrix(self):
        return self.field.from_sparse_rows(self.n, self.basis)

    def __eq__(self, other):
        return self.n == other.n and self.pivots == other.pivots and self.basis == other.basis

    def __le__(self, other):
        return all(other.contains(b) for b in self.basis)

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.n})"


def subspace_sum(a, b):
    return Subspace(a.field, a.n, a.basis + b.basis)


def subspace_intersect(a, b):
    if not a.basis or not b.basis:
        return Subspace(a.field, a.n)
    fld = a.field
    # columns: basis vectors of a then of b; kernel gives x.a = -y.b
    stacked = fld.from_sparse_cols(a.n, a.basis + b.basis)
    ker = kernel_basis(stacked)
    vecs = []
    for k in ker:
        acc = {}
        for c, row in zip(k[: len(a.basis)], a.basis):
            if c != 0:
                sp_add(acc, row, c)
        vecs.append(acc)
    return Subspace(fld, a.n, vecs)


def subspace_closure(start, ops, side="left"):
    """Smallest subspace containing ``start`` and stable under the linear maps ``ops``.

    ``ops`` are flint square matrices acting on column vectors.
    """
    fld = start.field
    current = start
    while True:
        new = list(current.basis)
        for op in ops:
            for v in current.basis:
                new.append(mat_apply(op, v))
        nxt = Subspace(fld, start.n, new)
        if nxt.dim == current.dim:
            return current
        current = nxt


def subspace_ops(kind, *args):
    if kind == "intersect":
        return subspace_intersect(*args)
    if kind == "sum":
        return subspace_sum(*args)
    if kind == "product-closure":
        return subspace_closure(*args)
    raise ValueError(f"unknown subspace operation {kind!r}")
