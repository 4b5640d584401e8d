"""Brute-force reference computations, independent of the flint-based code paths.

Everything here uses sympy matrices or plain Fractions and dense loops.
"""
from fractions import Fraction
from itertools import product

import sympy as sp


def struct_tensor(alg):
    """c[i][j][k] with e_i e_j = Σ_k c[i][j][k] e_k, as Fractions."""
    d = alg.dim
    out = [[[Fraction(0)] * d for _ in range(d)] for _ in range(d)]
    for i in range(d):
        for j in range(d):
            for k, v in alg.table[i][j].items():
                out[i][j][k] = Fraction(int(v.p), int(v.q))
    return out


def env_mul(c, x, y):
    """Product in B⊗B^op of dense vectors indexed a*d + b."""
    d = len(c)
    out = [Fraction(0)] * (d * d)
    for i1, j1 in product(range(d), repeat=2):
        u = x[i1 * d + j1]
        if not u:
            continue
        for i2, j2 in product(range(d), repeat=2):
            v = y[i2 * d + j2]
            if not v:
                continue
            for k1 in range(d):
                a = c[i1][i2][k1]
                if not a:
                    continue
                for k2 in range(d):
                    b = c[j2][j1][k2]  # opposite product on the second factor
                    if b:
                        out[k1 * d + k2] += u * v * a * b
    return out


def span_dim(vectors, n):
    if not vectors:
        return 0
    return sp.Matrix([[sp.Rational(x.numerator, x.denominator) for x in v] for v in vectors]).rank()


def span_basis(vectors):
    if not vectors:
        return []
    m = sp.Matrix([[sp.Rational(x.numerator, x.denominator) for x in v] for v in vectors])
    r, piv = m.rref()
    return [[Fraction(int(sp.fraction(r[i, j])[0]), int(sp.fraction(r[i, j])[1])) for j in range(m.cols)]
            for i in range(len(piv))]


def mu_basis(c):
    """ker(m : B⊗B → B) by sympy nullspace."""
    d = len(c)
    m = sp.zeros(d, d * d)
    for i, j in product(range(d), repeat=2):
        for k in range(d):
            m[k, i * d + j] = sp.Rational(c[i][j][k].numerator, c[i][j][k].denominator)
    out = []
    for v in m.nullspace():
        out.append([Fraction(int(sp.fraction(x)[0]), int(sp.fraction(x)[1])) for x in v])
    return out


def ideal_power_dims(c, k_max):
    """dim of μ^{k+1} for k = 0..k_max, as the span of (k+1)-fold products of μ."""
    mu = mu_basis(c)
    n = len(c) ** 2
    dims = []
    cur = mu
    for _ in range(k_max + 1):
        dims.append(span_dim(cur, n))
        nxt = [env_mul(c, x, y) for x in span_basis(cur) for y in mu]
        cur = [v for v in nxt if any(v)]
    return dims


def diff_dims(c, k_max):
    """dim Diff^k from the joint kernel of every δ chain of length k+1 (sympy)."""
    d = len(c)
    n = d * d

    def delta(b):
        # δ_b(D)(a) = D(a)b − D(ab) as a matrix on End(B), index i*d + j for D[i, j]
        m = sp.zeros(n, n)
        for i, j in product(range(d), repeat=2):
            col = i * d + j  # D = E_ij: E_ij(e_a) = δ_{ja} e_i
            for a in range(d):
                val = [sp.Integer(0)] * d
                if a == j:
                    for k in range(d):
                        val[k] += sp.Rational(c[i][b][k].numerator, c[i][b][k].denominator)
                for t in range(d):
                    if t == j:
                        coef = c[a][b][t]
                        val[i] -= sp.Rational(coef.numerator, coef.denominator)
                for k in range(d):
                    if val[k] != 0:
                        m[k * d + a, col] += val[k]
        return m

    deltas = [delta(b) for b in range(d)]
    out = []
    for k in range(k_max + 1):
        rows = []
        for tup in product(range(d), repeat=k + 1):
            m = sp.eye(n)
            for b in tup:
                m = deltas[b] * m
            rows.append(m)
        out.append(n - sp.Matrix.vstack(*rows).rank())
    return out


def truncated_poly_star(theta):
    """a∗b on Q[x,y]/(x³,y³) from a∗b = Σ θⁿ/n! (x²∂x)ⁿa · (y²∂y)ⁿb, via sympy polynomials."""
    x, y = sp.symbols("x y")
    th = sp.Rational(theta)

    def trunc(p):
        p = sp.Poly(sp.expand(p), x, y)
        return sum(c * x ** i * y ** j for (i, j), c in p.terms() if i < 3 and j < 3)

    def E(p):
        return trunc(x ** 2 * sp.diff(p, x))

    def E2(p):
        return trunc(y ** 2 * sp.diff(p, y))

    def star(a, b):
        out = 0
        ea, eb = a, b
        for n in range(3):
            out += th ** n / sp.factorial(n) * ea * eb
            ea, eb = E(ea), E2(eb)
        return sp.expand(trunc(out))

    monos = [x ** i * y ** j for i in range(3) for j in range(3)]
    return star, monos, (x, y)


def poly_to_vec(p, gens):
    x, y = gens
    out = {}
    if p == 0:
        return out
    for (i, j), c in sp.Poly(p, x, y).terms():
        out[i * 3 + j] = Fraction(int(sp.fraction(c)[0]), int(sp.fraction(c)[1]))
    return out


def flint_vec(vec):
    return {k: Fraction(int(v.p), int(v.q)) for k, v in vec.items() if v != 0}
